'''
Error Kinds for Support & Measure

Each failure mode named by the toolkit has its own exception class. They subclass the
builtin exceptions so callers that only care about "bad input" can keep catching
ValueError, and the CLI can map whole families onto exit codes.

Classes:
--------
- InvalidArgumentError(ValueError): malformed or mismatched inputs (grids, dims, weights).
- InvalidStateError(RuntimeError): an operation was asked of a value that cannot support it.
- EmptyBodyError(ValueError): a halfspace system has no common point.
- InvalidGridError(ValueError): directions fail to span, so bodies would be unbounded.
- DegenerateBodyError(ValueError): the body has zero volume; carries its affine dimension.
- AlexandrovViolationError(ValueError): a measure is not the surface measure of any body.
- InfeasibleError(ValueError): an optimisation problem has no feasible point.
- NonconvergenceError(RuntimeError): an iterative solver ran out of budget.

Author:
-------
Support & Measure Project
'''

class InvalidArgumentError(ValueError):
    pass

class InvalidStateError(RuntimeError):
    pass

class EmptyBodyError(ValueError):
    pass

class InvalidGridError(ValueError):
    pass

class DegenerateBodyError(ValueError):
    def __init__(self, message, affine_dim=None):
        super().__init__(message)
        self.affine_dim = affine_dim

class AlexandrovViolationError(ValueError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report

class InfeasibleError(ValueError):
    pass

class NonconvergenceError(RuntimeError):
    def __init__(self, message, residual=None, best=None):
        super().__init__(message)
        self.residual = residual
        self.best = best
