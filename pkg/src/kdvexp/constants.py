"""
Constant tables and tolerances for various kdvexp APIs.
"""

from kdvexp.enums import NormKind

SYMMETRY_TOLERANCE = 1e-13
"""
Relative tolerance (against the largest coefficient, floored at one) for
Hermitian symmetry checks on fields that must represent real functions.
"""

MEAN_TOLERANCE = 1e-13
"""
Relative tolerance (against the largest coefficient, floored at one) for the
zero-mode precondition of the steppers.
"""

STEP_EPSILON = 1e-9
"""
Fraction of a time step below which a leftover interval is treated as rounding
noise rather than a partial step.
"""

REFERENCE_TAU_RATIO = 100.0
"""
A fine reference must use a step at least this many times smaller than the
smallest step of the study it serves.
"""

MIN_FIT_RECORDS = 3
"""
A study fits a convergence slope only once it has at least this many rows.
"""

ORACLE_MAX_MODES = 64
"""
The brute-force oracles are quadratic (or worse) in the mode count; larger grids
are refused.
"""

DEFAULT_NORMS = (NormKind.H1,)
"""
The error norm used when a study doesn't name one.
"""

CSV_FLOAT_FORMAT = ".17g"
"""
Enough significant digits for every double to round-trip through text.
"""

NORM_LABELS = {
    NormKind.L2: "L2",
    NormKind.H1: "H1",
    NormKind.H2: "H2",
}
"""
Display labels for the norms, used in plot scripts and self-test tables.
"""
