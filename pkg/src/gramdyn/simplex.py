"""Probability-simplex states and sampling helpers."""

from dataclasses import dataclass

import numpy as np

__all__ = ["PopulationState", "as_state", "sample_interior", "spacings_to_simplex"]

SUM_TOL = 1e-12


def _as_prob_vector(p):
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size < 2:
        raise ValueError("state must be a 1-d vector with at least 2 entries")
    if np.any(p < 0.0):
        raise ValueError("state has negative entries")
    if abs(p.sum() - 1.0) > SUM_TOL:
        raise ValueError(f"state entries sum to {p.sum()!r}, not 1 within {SUM_TOL}")
    return p


@dataclass(frozen=True, eq=False)
class PopulationState:
    """Point on the probability simplex: p_i is the fraction of the
    population speaking grammar G_i.

    Entries must be nonnegative and sum to 1 within 1e-12.  The wrapped
    array is read-only.
    """

    p: np.ndarray

    def __post_init__(self):
        p = _as_prob_vector(self.p)
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.p.size

    def classify(self, atol: float = 1e-12) -> str:
        """Return "vertex", "boundary" or "interior" (tolerance atol)."""
        near_zero = self.p <= atol
        if not near_zero.any():
            return "interior"
        if np.any(self.p >= 1.0 - atol) and near_zero.sum() == self.n - 1:
            return "vertex"
        return "boundary"

    @classmethod
    def uniform(cls, n: int) -> "PopulationState":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def vertex(cls, n: int, i: int) -> "PopulationState":
        p = np.zeros(n)
        p[i] = 1.0
        return cls(p)

    def __repr__(self):
        body = ", ".join(repr(float(x)) for x in self.p)
        return f"PopulationState([{body}])"


def as_state(p) -> PopulationState:
    """Coerce an array-like (or pass through a PopulationState)."""
    if isinstance(p, PopulationState):
        return p
    return PopulationState(p)


def spacings_to_simplex(u: np.ndarray) -> np.ndarray:
    """Map n-1 uniforms on (0,1) to a simplex point via sorted spacings.

    This is the uniform (flat Dirichlet) distribution on the simplex.
    """
    u = np.sort(np.asarray(u, dtype=np.float64))
    return np.diff(np.concatenate(([0.0], u, [1.0])))


def sample_interior(n: int, rng: np.random.Generator, eps: float = 1e-3) -> PopulationState:
    """Draw a uniform simplex point conditioned on min p_i >= eps."""
    while True:
        p = spacings_to_simplex(rng.random(n - 1))
        if p.min() >= eps:
            return PopulationState(p)
