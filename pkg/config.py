'''
Runtime Configuration for Support & Measure

Every tolerance, grid default and solver budget used across the toolkit lives here, so a
grid-refinement study only has to touch one knob. Values come from the defaults below and
can be overridden through a '.env' file or the process environment.

Environment Keys:
-----------------
- SM_TOL_<FIELD>: overrides one field of 'Tolerances' (e.g. SM_TOL_FEASIBILITY=1e-10).
- SM_GRID_2D: number of equally spaced directions for dim 2 grids (default 720).
- SM_GRID_3D_LEVEL: icosphere subdivision level for dim 3 grids (default 3, i.e. 642 directions).
- SM_MAX_ITERS: iteration budget shared by the iterative solvers (default 5000).
- SM_ERROR_LOG: path of the append-only failure log (default 'error_log.txt').

Functions:
----------
load_tolerances() → Tolerances
    Builds the tolerance set from defaults and environment overrides.

with_overrides(tol, **changes) → Tolerances
    Returns a copy with some fields replaced (used by CLI flags).

Dependencies:
-------------
- dotenv: loads the '.env' file before reading the environment.

Author:
-------
Support & Measure Project
'''

import os
from dataclasses import dataclass, fields, replace
from dotenv import load_dotenv

load_dotenv()

DEFAULT_GRID_2D = int(os.getenv("SM_GRID_2D", "720"))
DEFAULT_GRID_3D_LEVEL = int(os.getenv("SM_GRID_3D_LEVEL", "3"))
DEFAULT_MAX_ITERS = int(os.getenv("SM_MAX_ITERS", "5000"))
ERROR_LOG = os.getenv("SM_ERROR_LOG", "error_log.txt")

@dataclass(frozen=True)
class Tolerances:
    unit: float = 1e-12               # Direction norm
    grid_mass: float = 1e-6           # relative, sum of quadrature weights
    grid_symmetry: float = 1e-8       # norm of sum q_i u_i
    feasibility: float = 1e-9         # halfspace / inclusion comparisons
    closure: float = 1e-8             # relative Minkowski closure residual
    snap: float = 1e-10               # atom-to-grid / atom merging distance
    measure_rel: float = 1e-8         # atom-by-atom weight equality
    lp: float = 1e-9                  # simplex feasibility
    solver_residual: float = 1e-6     # Minkowski solver stopping residual
    kkt: float = 1e-4                 # Urysohn-family stationarity residual
    contact: float = 2e-2             # contact conditions at 720 directions

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, (int, float)) or value <= 0:
                raise ValueError(f"Tolerance '{f.name}' must be a positive number, got {value!r}.")

def load_tolerances() -> Tolerances:
    overrides = {}
    for f in fields(Tolerances):
        raw = os.getenv(f"SM_TOL_{f.name.upper()}")
        if raw is not None:
            overrides[f.name] = float(raw)
    return Tolerances(**overrides)

def with_overrides(tol: Tolerances, **changes) -> Tolerances:
    changes = {k: v for k, v in changes.items() if v is not None}
    return replace(tol, **changes)

TOL = load_tolerances()
