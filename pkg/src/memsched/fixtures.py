"""Built-in deterministic fixtures.

The desk-scale test image is synthetic: a checkerboard carries the
dominant singular direction, a smooth gradient adds two mid-strength
triplets, and a seeded sum of decaying rank-1 terms fills out a steep
tail so the spectrum stays full rank after quantization.
"""

from __future__ import annotations

import numpy as np

from .rng import SplitMix64

DESK_IMAGE_SIZE = 64
DESK_IMAGE_SEED = 2026


def make_desk_image(size: int = DESK_IMAGE_SIZE, seed: int = DESK_IMAGE_SEED) -> np.ndarray:
    """Synthetic grayscale image with a steep singular spectrum (0..255 ints)."""
    rng = SplitMix64(seed)

    def unit(vec: np.ndarray) -> np.ndarray:
        return vec / np.linalg.norm(vec)

    def rand_unit() -> np.ndarray:
        return unit(np.array([rng.uniform(-1.0, 1.0) for _ in range(size)]))

    checker = unit(np.array([1.0 if i % 2 == 0 else -1.0 for i in range(size)]))
    ramp = unit(np.linspace(-1.0, 1.0, size))
    flat = unit(np.ones(size))

    field = np.outer(checker, checker)
    field += 0.32 * np.outer(ramp, flat)
    field += 0.13 * np.outer(flat, ramp)
    coeff = 0.06
    for _ in range(size - 3):
        field += coeff * np.outer(rand_unit(), rand_unit())
        coeff = max(coeff * 0.90, 0.012)

    lo, hi = field.min(), field.max()
    pixels = np.rint((field - lo) / (hi - lo) * 255.0).astype(np.int64)
    return pixels
