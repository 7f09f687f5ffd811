# Dense factorizations and triangular solves
from singular_ssm.linalg.decompose import (
    flip_matrix,
    lower_factor,
    lq_complete,
    ql_complete,
    qr_complete,
    qr_thin,
    solve_triangular,
)

__all__ = [
    "flip_matrix",
    "lower_factor",
    "lq_complete",
    "ql_complete",
    "qr_complete",
    "qr_thin",
    "solve_triangular",
]
