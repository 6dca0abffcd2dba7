"""Random vector pairs with a controlled share of orthogonal ones."""

import numpy as np

from auerbach import p_map


def smooth_pairs(p, count, rng, dim_range=(2, 6)):
    """Thirds: y projected onto ker pmap(x) (orthogonal), generic, and nearly orthogonal (offset 1e-3)."""
    out = []
    for k in range(count):
        n = int(rng.integers(*dim_range, endpoint=True))
        x = rng.standard_normal(n) * rng.choice([1e-3, 1.0, 1e3])
        y = rng.standard_normal(n)
        kind = k % 3
        if kind != 1:
            f = p_map(x / np.max(np.abs(x)), p)
            y = y - (y @ f) / (x @ f) * x
            if kind == 2:
                y = y + 1e-3 * np.linalg.norm(y) * x / np.linalg.norm(x)
        if not np.any(y):
            y = np.ones(n)
        out.append((x, y))
    return out


def polyhedral_pairs(count, rng, dim_range=(2, 5)):
    """Small-integer entries so ties in the max (p = inf) and zeros (p = 1) are common."""
    out = []
    while len(out) < count:
        n = int(rng.integers(*dim_range, endpoint=True))
        x = rng.integers(-2, 3, n).astype(float)
        y = rng.integers(-2, 3, n).astype(float)
        if np.any(x) and np.any(y):
            out.append((x * rng.uniform(0.5, 2.0), y * rng.uniform(0.5, 2.0)))
    return out
