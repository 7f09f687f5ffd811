"""
Experiment constants: benchmark configurations and sizes.
"""

from fractions import Fraction


class Precision:
    """Floating-point precisions accepted on the command line."""

    SINGLE = "single"
    DOUBLE = "double"


class ExitCode:
    """Process exit codes of the command-line interface."""

    OK = 0
    PARSE = 2
    RANK_DEFICIENT = 3
    NUMERICAL = 4


# (ell, r) as fractions of n for the runtime benchmark
RUNTIME_CONFIGS = {
    "l=n/2,r=0": (Fraction(1, 2), Fraction(0)),
    "l=n/4,r=0": (Fraction(1, 4), Fraction(0)),
    "l=n/4,r=n/4": (Fraction(1, 4), Fraction(1, 4)),
    "l=n/8,r=n/8": (Fraction(1, 8), Fraction(1, 8)),
}

RUNTIME_SIZES = [10, 100, 1000]
RUNTIME_HORIZON = 50
RUNTIME_REPEATS = 3

# (n, ell) pairs of the Hilbert robustness benchmark
HILBERT_DIMS = [(5, 2), (6, 3), (7, 3), (8, 4), (9, 4), (10, 5), (11, 5)]
HILBERT_HORIZON = 500
HILBERT_SEED = 1

# Largest stacked dimension (T+1)(n+ell+r) of the dense batch reference
JOINT_SIZE_LIMIT = 2000

# Stream identifiers of the counter-based noise generator
STREAM_PROCESS_NOISE = 0
STREAM_OBSERVATION_NOISE = 1
STREAM_PARAMETERS = 2
STREAM_POSTERIOR_SAMPLES = 3
