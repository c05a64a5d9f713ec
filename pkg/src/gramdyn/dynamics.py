"""Inter-generational dynamics of grammar competition.

Two layers:
  - the deterministic map taking the population state p to the next
    generation's state, valid in the reliable-learner regime (small
    learning rate, long exposure), and
  - the stochastic linear reward-penalty learner it approximates,
    simulated token by token.

The map sends p to p_i' = prod_{j != i} c_j / sum_k prod_{j != k} c_j,
where c is the penalty vector at p.  In product form the vertices are
exact rest points; for a proper advantage matrix the denominator never
vanishes on the simplex.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .advantage import AdvantageMatrix
from .simplex import PopulationState, as_state

__all__ = [
    "LearnerState",
    "Trajectory",
    "generational_simulation",
    "increment",
    "lrp_update",
    "reliable_map",
    "simulate_lrp_ensemble",
    "simulate_lrp_learner",
    "trajectory",
]


def _require_proper(matrix: AdvantageMatrix):
    if not matrix.proper:
        raise ValueError(
            "advantage matrix is not proper (some off-diagonal entry is 0); "
            "the map is not well-defined for improper systems"
        )


def _raw_penalties(entries: np.ndarray, p: np.ndarray) -> np.ndarray:
    return entries @ p - np.diagonal(entries) * p


def map_formula(entries: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Evaluate the map as a bare rational function of p.

    No simplex checks: the chart Jacobian perturbs coordinates slightly
    off the simplex, where the formula still extends smoothly.
    Penalties are rescaled by their largest magnitude before forming
    products; the map is invariant under positive rescaling, and this
    avoids underflow for small advantages.
    """
    c = _raw_penalties(entries, p)
    scale = np.max(np.abs(c))
    if scale == 0.0:
        raise ValueError("all penalties vanish; map undefined")
    d = c / scale
    n = d.size
    num = np.empty(n)
    for i in range(n):
        prod = 1.0
        for j in range(n):
            if j != i:
                prod *= d[j]
        num[i] = prod
    denom = num.sum()
    if denom == 0.0:
        raise ValueError("degenerate penalties; map undefined")
    return num / denom


def reliable_map(matrix: AdvantageMatrix, p) -> PopulationState:
    """One generation of the deterministic dynamics.

    Vertices map to themselves exactly: a vertex zeroes exactly one
    penalty, which kills every product except the one omitting it.
    """
    _require_proper(matrix)
    state = as_state(p)
    if state.n != matrix.n:
        raise ValueError("dimension mismatch between matrix and state")
    return PopulationState(map_formula(matrix.entries, state.p))


def increment(matrix: AdvantageMatrix, p) -> np.ndarray:
    """Per-generation change p' - p; components sum to 0."""
    state = as_state(p)
    return reliable_map(matrix, state).p - state.p


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-ordered population states; states[0] is the initial state
    and generations counts map applications, so len(states) is
    generations + 1."""

    states: tuple
    generations: int

    def as_array(self) -> np.ndarray:
        return np.array([s.p for s in self.states])

    def final(self) -> PopulationState:
        return self.states[-1]


def trajectory(matrix: AdvantageMatrix, p0, generations: int) -> Trajectory:
    """Iterate the deterministic map for the given number of generations."""
    if generations < 1:
        raise ValueError("need at least 1 generation")
    state = as_state(p0)
    states = [state]
    for _ in range(generations):
        state = reliable_map(matrix, state)
        states.append(state)
    return Trajectory(tuple(states), generations)


# -- stochastic learner ------------------------------------------------

@dataclass(frozen=True, eq=False)
class LearnerState:
    """A single learner's grammar probabilities under reward-penalty
    updating.

    The update preserves the sum algebraically; the constructor allows
    float drift up to 1e-9 (observed drift over 10^6 updates is orders
    of magnitude smaller).
    """

    pi: np.ndarray
    gamma: float
    tokens_seen: int = 0

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=np.float64)
        if pi.ndim != 1 or pi.size < 2:
            raise ValueError("pi must be a 1-d vector with at least 2 entries")
        if np.any(pi < 0.0) or abs(pi.sum() - 1.0) > 1e-9:
            raise ValueError("pi must be a probability vector")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        pi = pi.copy()
        pi.flags.writeable = False
        object.__setattr__(self, "pi", pi)

    @property
    def n(self) -> int:
        return self.pi.size

    @classmethod
    def fresh(cls, n: int, gamma: float) -> "LearnerState":
        return cls(np.full(n, 1.0 / n), gamma)


def lrp_update(s: LearnerState, chosen: int, parsed: bool) -> LearnerState:
    """One reward-penalty step.

    Success boosts the chosen grammar and shrinks the rest; failure
    shrinks the chosen grammar and redistributes gamma/(n-1) to each
    rival.  Expressions here are kept identical to the batched kernel
    so the two paths agree bit for bit.
    """
    n = s.n
    if not 0 <= chosen < n:
        raise IndexError(f"chosen grammar {chosen} out of range for n={n}")
    g = s.gamma
    pi = s.pi
    if parsed:
        new = (1.0 - g) * pi
        new[chosen] = pi[chosen] + g * (1.0 - pi[chosen])
    else:
        new = g / (n - 1) + (1.0 - g) * pi
        new[chosen] = (1.0 - g) * pi[chosen]
    return LearnerState(new, g, s.tokens_seen + 1)


def _check_learning_params(gamma: float, T: int):
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    if T < 1:
        raise ValueError("need at least 1 token")


def simulate_lrp_ensemble(matrix: AdvantageMatrix, p, gamma: float, T: int,
                          learners: int, seed: int) -> np.ndarray:
    """Final grammar probabilities of `learners` independent learners,
    each exposed to T tokens from the stationary environment p.

    Returns a (learners, n) array, row i the learner with the i-th
    derived stream; the batching is bit-equivalent to running each
    learner alone with its own stream.
    """
    _require_proper(matrix)
    state = as_state(p)
    if state.n != matrix.n:
        raise ValueError("dimension mismatch between matrix and state")
    _check_learning_params(gamma, T)
    if learners < 1:
        raise ValueError("need at least 1 learner")
    states = _kernels.init_states(_kernels.member_seeds(seed, learners))
    pi = np.full((matrix.n, learners), 1.0 / matrix.n)
    _kernels.lrp_ensemble_kernel(matrix.entries, np.cumsum(state.p),
                                 gamma, T, states, pi)
    return pi.T.copy()


def simulate_lrp_learner(matrix: AdvantageMatrix, p, gamma: float, T: int,
                         seed: int) -> LearnerState:
    """One learner against the stationary environment p.

    Starts uniform, then per token: sample the generating grammar from
    p, sample the learner's grammar from pi, fail with probability
    a[chosen, generator], update.  Deterministic given seed.
    """
    pi = simulate_lrp_ensemble(matrix, p, gamma, T, 1, seed)
    return LearnerState(pi[0], gamma, T)


def generational_simulation(matrix: AdvantageMatrix, p0, generations: int,
                            gamma: float, T: int,
                            learners_per_generation: int, seed: int) -> Trajectory:
    """Chain of non-overlapping learner generations.

    Each generation learns from the previous generation's output
    mixture; the next population state is the ensemble mean of final
    grammar probabilities (renormalized, which moves entries by at most
    the accumulated float drift of ~1e-12).
    """
    _require_proper(matrix)
    state = as_state(p0)
    if state.n != matrix.n:
        raise ValueError("dimension mismatch between matrix and state")
    _check_learning_params(gamma, T)
    if generations < 1:
        raise ValueError("need at least 1 generation")
    if learners_per_generation < 1:
        raise ValueError("need at least 1 learner per generation")
    n = matrix.n
    m = learners_per_generation
    all_seeds = _kernels.member_seeds(seed, generations * m).reshape(generations, m)
    states = [state]
    for t in range(generations):
        rng_states = _kernels.init_states(all_seeds[t])
        pi = np.full((n, m), 1.0 / n)
        _kernels.lrp_ensemble_kernel(matrix.entries, np.cumsum(state.p),
                                     gamma, T, rng_states, pi)
        mean = pi.mean(axis=1)
        state = PopulationState(mean / mean.sum())
        states.append(state)
    return Trajectory(tuple(states), generations)
