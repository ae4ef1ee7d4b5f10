'''
CLI Input/Output Module

Reads and writes the JSON formats of Support & Measure, renders bodies to SVG (dim 2) and
Wavefront OBJ (dim 3) and keeps a deterministic manifest per run.

File Formats:
-------------
- Body:    {"dim": 2, "grid": {"resolution": 720}, "h": [...]}  or  {"dim": N, "vertices": [[...], ...]}
- Measure: {"dim": 2, "atoms": [{"u": [x, y], "w": 1.0}, ...]}
- Problem: {"problem": "urysohn" | "flattening" | "vector_iso" | "leidenfrost", ...}
    urysohn     kind, breadth_target, obstacle (body), symmetric, grid
    flattening  the urysohn fields plus zbar, lam_vol, lam_flat, rotational
    vector_iso  ys (bodies), target_volume, weights (list of weight vectors), grid
    leidenfrost area, weights (list of pairs), grid
- Report / witness: ConditionReport.to_dict() and TransportWitness.to_dict().

Key Functions:
--------------
- load_json(path), save_json(path, data)
- body_from_dict(data, grid), body_to_dict(x), read_body(path, grid), write_body(x, path)
- measure_from_dict(data), read_measure(path), write_measure(m, path)
- read_problem(path, grid_override) → (name, spec-like object)
- write_report(report, path), write_witness(witness, path)
- render_svg(x, path): closed path of the reconstructed polygon, 9 significant digits.
- render_obj(x, path): facets fanned from their centroids.
- file_digest(paths): sha256 over the input files, in order.
- log_error(command, error): one line per failure appended to the error log.

Notes:
------
- Nothing written here carries a timestamp, so reruns produce identical bytes.
- Vertex bodies are sampled on the grid given by the caller (or the configured default).

Dependencies:
-------------
- json, hashlib
- numpy
- rich (stderr console)
- convex_core, measures, iso_problems, config, errors

Author:
-------
Support & Measure Project
'''

import json
import hashlib
from dataclasses import dataclass, field
from typing import List, Optional
import numpy as np
from rich.console import Console
from config import ERROR_LOG, DEFAULT_GRID_2D, DEFAULT_GRID_3D_LEVEL
from errors import InvalidArgumentError
from convex_core import SphereGrid, SupportVector, Polytope, make_grid, reconstruct, unit
from measures import SphericalMeasure
from iso_problems import UrysohnSpec, FlatteningSpec

console = Console(stderr=True)

DIGITS = 9
PROBLEMS = ("urysohn", "flattening", "vector_iso", "leidenfrost")

def load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise InvalidArgumentError(f"File not found: {path}")
    except json.JSONDecodeError as e:
        raise InvalidArgumentError(f"{path} is not valid JSON: {e}")

def save_json(path, data):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=True, indent=2)

def log_error(command, error):
    with open(ERROR_LOG, "a", encoding="utf-8") as f:
        f.write(f"Error running {command}: {error}.\n")

# Bodies and measures

def default_grid(dim: int, resolution: Optional[int] = None) -> SphereGrid:
    if resolution is None:
        resolution = DEFAULT_GRID_2D if dim == 2 else DEFAULT_GRID_3D_LEVEL
    return make_grid(dim, resolution)

def _require(data, *keys):
    if not isinstance(data, dict):
        raise InvalidArgumentError(f"Expected a JSON object, got {type(data).__name__}.")
    missing = [k for k in keys if k not in data]
    if missing:
        raise InvalidArgumentError(f"Missing field(s): {', '.join(missing)}.")

def body_from_dict(data, grid: Optional[SphereGrid] = None) -> SupportVector:
    '''SupportVector from either body form; a mismatched grid form is resampled onto grid.'''
    _require(data, "dim")
    dim = int(data["dim"])
    if "vertices" in data:
        points = np.asarray(data["vertices"], dtype=float)
        if points.ndim != 2 or points.shape[1] != dim:
            raise InvalidArgumentError("Vertices must be a list of points of the stated dimension.")
        return SupportVector.from_points(points, grid or default_grid(dim))
    _require(data, "grid", "h")
    own = make_grid(dim, int(data["grid"]["resolution"]))
    x = SupportVector(own, np.asarray(data["h"], dtype=float))
    if grid is None or grid.matches(own):
        return x
    if grid.dim != dim:
        raise InvalidArgumentError("Body and grid dimensions differ.")
    return SupportVector.from_polytope(reconstruct(x), grid)

def body_to_dict(x: SupportVector) -> dict:
    if x.grid.resolution is not None:
        return {"dim": x.dim, "grid": {"resolution": int(x.grid.resolution)}, "h": [float(v) for v in x.h]}
    return {"dim": x.dim, "vertices": [[float(c) for c in v] for v in reconstruct(x).vertices]}

def read_body(path, grid: Optional[SphereGrid] = None) -> SupportVector:
    return body_from_dict(load_json(path), grid)

def write_body(x: SupportVector, path):
    save_json(path, body_to_dict(x))

def measure_from_dict(data) -> SphericalMeasure:
    _require(data, "dim", "atoms")
    try:
        atoms = [(a["u"], float(a["w"])) for a in data["atoms"]]
    except (KeyError, TypeError) as e:
        raise InvalidArgumentError(f"Malformed atom list: {e}")
    return SphericalMeasure.from_atoms(int(data["dim"]), atoms)

def read_measure(path) -> SphericalMeasure:
    return measure_from_dict(load_json(path))

def write_measure(m: SphericalMeasure, path):
    save_json(path, m.to_dict())

def is_measure(data) -> bool:
    return isinstance(data, dict) and "atoms" in data

def write_report(report, path):
    save_json(path, report.to_dict())

def write_witness(witness, path):
    save_json(path, witness.to_dict())

# Problems

def problem_grid(data, dim, grid_override=None) -> SphereGrid:
    if grid_override is not None:
        return default_grid(dim, grid_override)
    resolution = data.get("grid", {}).get("resolution") if isinstance(data.get("grid"), dict) else None
    return default_grid(dim, resolution)

def urysohn_from_dict(data, grid_override=None) -> UrysohnSpec:
    _require(data, "kind", "breadth_target")
    dim = int(data.get("dim", (data.get("obstacle") or {}).get("dim", 2)))
    grid = problem_grid(data, dim, grid_override)
    obstacle = body_from_dict(data["obstacle"], grid) if data.get("obstacle") is not None else None
    return UrysohnSpec(data["kind"], float(data["breadth_target"]), grid, obstacle, bool(data.get("symmetric", False)))

def read_problem(path, grid_override=None):
    '''(problem name, spec) where spec is a UrysohnSpec, FlatteningSpec or a plain dict of parsed fields.'''
    data = load_json(path)
    _require(data, "problem")
    name = data["problem"]
    if name not in PROBLEMS:
        raise InvalidArgumentError(f"Unknown problem '{name}', expected one of {PROBLEMS}.")
    if name == "urysohn":
        return name, urysohn_from_dict(data, grid_override)
    if name == "flattening":
        _require(data, "zbar")
        base = urysohn_from_dict(data, grid_override)
        spec = FlatteningSpec(base, unit(data["zbar"]), float(data.get("lam_vol", 1.0)), float(data.get("lam_flat", 0.0)))
        return name, {"spec": spec, "rotational": bool(data.get("rotational", False))}
    if name == "vector_iso":
        _require(data, "ys", "target_volume", "weights")
        if not data["ys"]:
            raise InvalidArgumentError("vector_iso needs at least one body.")
        dim = int(data["ys"][0]["dim"])
        grid = problem_grid(data, dim, grid_override)
        ys = [body_from_dict(y, grid) for y in data["ys"]]
        return name, {"ys": ys, "target_volume": float(data["target_volume"]), "weights": data["weights"]}
    _require(data, "area", "weights")
    return name, {"area": float(data["area"]), "weights": data["weights"],
                  "grid2": problem_grid(data, 2, grid_override)}

# Figures

def _fmt(v) -> str:
    text = f"{float(v):.{DIGITS}g}"
    return "0" if text == "-0" else text

def render_svg(x: SupportVector, path):
    if x.dim != 2:
        raise InvalidArgumentError("SVG output is for planar bodies.")
    verts = reconstruct(x).vertices
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    centre = 0.5 * (lo + hi)
    extent = float(max(hi - lo))
    pts = (verts - centre) / extent
    pts[:, 1] = -pts[:, 1]
    d = "M " + " L ".join(f"{_fmt(px)} {_fmt(py)}" for px, py in pts) + " Z"
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="-0.55 -0.55 1.1 1.1">',
             f'  <path d="{d}" fill="none" stroke="black" stroke-width="0.004"/>',
             '</svg>']
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    return len(pts)

def _facet_loops(p: Polytope):
    scale = max(1.0, float(np.abs(p.vertices).max()))
    for n, offset in zip(p.normals, p.offsets):
        on = np.flatnonzero(np.abs(p.vertices @ n - offset) <= 1e-7 * scale)
        if len(on) < 3:
            continue
        corners = p.vertices[on]
        centre = corners.mean(axis=0)
        a = unit(np.cross(n, [1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.cross(n, [0.0, 1.0, 0.0]))
        b = np.cross(n, a)
        angles = np.arctan2((corners - centre) @ b, (corners - centre) @ a)
        yield centre, on[np.argsort(angles, kind="stable")]

def render_obj(x: SupportVector, path):
    if x.dim != 3:
        raise InvalidArgumentError("OBJ output is for bodies in space.")
    p = reconstruct(x)
    lines = [f"v {_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}" for v in p.vertices]
    faces = []
    count = len(p.vertices)
    for centre, loop in _facet_loops(p):
        lines.append(f"v {_fmt(centre[0])} {_fmt(centre[1])} {_fmt(centre[2])}")
        count += 1
        for a, b in zip(loop, np.roll(loop, -1)):
            faces.append(f"f {count} {a + 1} {b + 1}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines + faces) + "\n")
    return len(faces)

# Manifest

def file_digest(paths) -> str:
    digest = hashlib.sha256()
    for path in paths:
        with open(path, "rb") as f:
            digest.update(f.read())
    return digest.hexdigest()

@dataclass
class RunManifest:
    command: str
    input_digest: str
    options: dict = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)
    residuals: dict = field(default_factory=dict)

    def to_dict(self):
        return {"command": self.command, "input_digest": self.input_digest,
                "options": {k: self.options[k] for k in sorted(self.options)},
                "outputs": list(self.outputs),
                "residuals": {k: float(self.residuals[k]) for k in sorted(self.residuals)}}

    def write(self, path):
        save_json(path, self.to_dict())
