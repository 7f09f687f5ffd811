"""
Operation-count model of one filter step, reduced versus unreduced.

Costs count matrix-matrix work only, with constant factors dropped:
the 2(n - ell) QR is charged (n - ell)^3.
"""

from singular_ssm.utils.errors import DimensionMismatch


class FlopModel:
    """Per-step operation counts."""

    @staticmethod
    def reduced_cost(n: float, ell: float, r: float) -> float:
        """
        Filter step on the reduced model.

        Terms: n^3 (QR for the constraint update), (n - ell) ell^2 (back
        substitutions), (n - ell)^3 (QR for the prediction), (n + r - ell)^3
        (QR for the observation update), r^3 (back substitutions).
        """
        u = n - ell
        return n ** 3 + u * ell ** 2 + u ** 3 + (n + r - ell) ** 3 + r ** 3

    @staticmethod
    def unreduced_cost(n: float, m: float) -> float:
        """Robust filter step on the unreduced model with m = ell + r observations."""
        return n ** 3 + (n + m) ** 3 + n * m ** 2

    @classmethod
    def ratio(cls, n: float, ell: float, r: float) -> float:
        return cls.reduced_cost(n, ell, r) / cls.unreduced_cost(n, ell + r)


def flop_ratio(n: float, ell: float, r: float) -> float:
    """
    Predicted reduced/unreduced runtime ratio.

    Args:
        n: State dimension (> 0)
        ell: Noise-free observation dimension
        r: Noisy observation dimension

    Returns:
        reduced_cost / unreduced_cost
    """
    if n <= 0 or ell < 0 or r < 0 or ell + r > n:
        raise DimensionMismatch(f"invalid dimensions n={n}, ell={ell}, r={r}")
    return FlopModel.ratio(n, ell, r)
