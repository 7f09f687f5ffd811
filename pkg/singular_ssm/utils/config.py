from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared across the package.

    Attributes:
        triangular_floor: Diagonal magnitudes at or below this raise SingularTriangular.
        rank_floor: Diagonal magnitudes of S_c, Z_c, Z_u, L_u at or below this raise RankDeficient.
        pinv_rtol: Relative eigenvalue threshold of the batch pseudoinverse.
        symmetry_atol: Symmetry tolerance of dense covariances.
        psd_rtol: Relative negative-eigenvalue floor of dense covariances.
    """

    triangular_floor: float = 0.0
    rank_floor: float = 0.0
    pinv_rtol: float = 1e-10
    symmetry_atol: float = 1e-12
    psd_rtol: float = 1e-10


DEFAULT_TOLERANCES = Tolerances()
