import numpy as np


def keyed_generator(seed: int, t: int, stream: int) -> np.random.Generator:
    """
    Counter-based generator keyed by (seed, t, stream).

    Draws for one (t, stream) pair do not depend on how many numbers other pairs
    consumed, so simulation order and parallelism never change the noise.

    Args:
        seed: Run seed (unsigned 64-bit)
        t: Time index
        stream: Stream identifier (see utils.constants)

    Returns:
        numpy Generator backed by Philox
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, t, stream])))


def standard_normal(seed: int, t: int, stream: int, size: int, dtype=np.float64) -> np.ndarray:
    """Draw a standard-normal vector for one (seed, t, stream) key."""
    return keyed_generator(seed, t, stream).standard_normal(size).astype(dtype, copy=False)
