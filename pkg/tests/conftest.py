"""Shared test fixtures and pure-python reference implementations.

The reference random stream below reimplements the batched kernels'
generator (splitmix64-seeded xoshiro256+) with plain python integers so
the ensemble kernels can be cross-checked bit for bit against the
single-step update functions.  Keep the constants and consumption order
in sync with the kernel module's docstring.
"""

import numpy as np
import pytest

from gramdyn import advantage

MASK = (1 << 64) - 1


def _splitmix_state(seed: int):
    s = int(seed) & MASK
    out = []
    for _ in range(4):
        s = (s + 0x9E3779B97F4A7C15) & MASK
        z = s
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        out.append(z ^ (z >> 31))
    return out


class ReferenceStream:
    """xoshiro256+ with the same seeding as the kernels."""

    def __init__(self, seed: int):
        self.s = _splitmix_state(seed)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s
        result = (s0 + s3) & MASK
        t = (s1 << 17) & MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & MASK
        self.s = [s0, s1, s2, s3]
        return result

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0 ** -53


def categorical(u: float, weights) -> int:
    """Cumulative-threshold draw, identical rule to the kernels."""
    cum = np.cumsum(np.asarray(weights, dtype=np.float64))
    idx = 0
    for j in range(len(cum) - 1):
        idx += u >= cum[j]
    return int(idx)


def random_region_weights(rng: np.random.Generator, n: int):
    """Uniform random measure over the nonempty grammar subsets."""
    subsets = advantage._subsets(n)
    w = rng.dirichlet(np.ones(len(subsets)))
    return advantage.RegionMeasure(n, dict(zip(subsets, w)))


def random_proper_matrix(rng: np.random.Generator, n: int = 3):
    """Random proper advantage system drawn through region measures."""
    for _ in range(100):
        matrix = advantage.from_regions(random_region_weights(rng, n))
        if matrix.proper:
            return matrix
    raise AssertionError("no proper matrix in 100 draws")


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    from gramdyn import _kernels
    _kernels.warmup()
