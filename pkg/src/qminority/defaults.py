"""Central numerical defaults.

Every tolerance used by the package is defined here so tests and CLI output
can reference one set of numbers.  Functions take these as keyword defaults;
callers may override.
"""

# algebraic identities (norms, unitarity, closed-form cross-checks)
ALGEBRA_TOL = 1e-12

# iterative refinement (grid polish, waveplate solve)
OPT_TOL = 1e-9

# deviation gain below which a symmetric point is certified as an equilibrium
NE_GAIN_TOL = 1e-6

# default grid resolution per axis for scans
GRID = 64
