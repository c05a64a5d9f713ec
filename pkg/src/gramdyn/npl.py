"""Naive parameter learning on small parametric grammar spaces.

Instead of one probability per grammar, the learner keeps one
probability xi_i per binary parameter and draws a grammar by flipping
the parameters independently; reward and penalty act on the parameter
coins.  A grammar space is a ToyUGSpec: the strings, which grammar
(bit-vector sigma) parses which strings, and what each grammar emits.

The shipped "det-noun" preset is a two-parameter space over the strings
N, DN, ND: parameter 1 allows a null determiner, parameter 2 puts the
determiner before the noun.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import _kernels
from .advantage import PenaltyVector

__all__ = [
    "PRESETS",
    "ParamState",
    "ToyUGSpec",
    "det_noun_spec",
    "grammar_distribution",
    "grammar_label",
    "grammar_order",
    "npl_generations",
    "npl_penalties",
    "npl_update",
    "simulate_npl_ensemble",
    "simulate_npl_learner",
    "string_distribution",
]


def grammar_order(num_params: int) -> list:
    """Canonical grammar order: bit-vectors with 1 before 0, first
    parameter slowest, e.g. (1,1), (1,0), (0,1), (0,0) for N=2."""
    return list(product((1, 0), repeat=num_params))


def grammar_label(sigma) -> str:
    return "G" + "".join(str(b) for b in sigma)


@dataclass(frozen=True, eq=False)
class ToyUGSpec:
    """A small parametric grammar space.

    parse_table maps each sigma (tuple of 0/1 of length num_params) to
    the set of strings that grammar parses; output_dist maps each sigma
    to its emission distribution, which must be supported on strings
    the grammar itself parses and sum to 1.
    """

    num_params: int
    strings: tuple
    parse_table: dict
    output_dist: dict

    def __post_init__(self):
        if not 1 <= self.num_params <= 8:
            raise ValueError("num_params must be in 1..8")
        strings = tuple(self.strings)
        if len(set(strings)) != len(strings) or not strings:
            raise ValueError("strings must be nonempty and unique")
        order = grammar_order(self.num_params)
        parse_table = {}
        output_dist = {}
        for sigma in order:
            if sigma not in self.parse_table or sigma not in self.output_dist:
                raise ValueError(f"missing grammar {grammar_label(sigma)}")
            parsed = frozenset(self.parse_table[sigma])
            if not parsed <= set(strings):
                raise ValueError(f"{grammar_label(sigma)} parses unknown strings")
            dist = {s: float(w) for s, w in self.output_dist[sigma].items() if w != 0.0}
            if not set(dist) <= parsed:
                raise ValueError(
                    f"{grammar_label(sigma)} emits strings it cannot parse")
            total = sum(dist.values())
            if any(w < 0.0 for w in dist.values()) or abs(total - 1.0) > 1e-12:
                raise ValueError(
                    f"{grammar_label(sigma)} output distribution must sum to 1")
            parse_table[sigma] = parsed
            output_dist[sigma] = dist
        object.__setattr__(self, "strings", strings)
        object.__setattr__(self, "parse_table", parse_table)
        object.__setattr__(self, "output_dist", output_dist)

    @property
    def grammars(self) -> list:
        return grammar_order(self.num_params)

    def parse_rows(self) -> np.ndarray:
        """(2^N, S) boolean table indexed by sigma read as a binary
        number (first parameter is the high bit) -- the kernel layout."""
        n, s = self.num_params, len(self.strings)
        rows = np.zeros((2 ** n, s), dtype=np.bool_)
        for sigma in self.grammars:
            gidx = 0
            for b in sigma:
                gidx = 2 * gidx + b
            for js, string in enumerate(self.strings):
                rows[gidx, js] = string in self.parse_table[sigma]
        return rows


def det_noun_spec() -> ToyUGSpec:
    """Two parameters over N, DN, ND: parameter 1 permits dropping the
    determiner, parameter 2 orders determiner before noun.  Grammars
    with optional forms emit them with equal probability."""
    return ToyUGSpec(
        num_params=2,
        strings=("N", "DN", "ND"),
        parse_table={
            (1, 1): {"N", "DN"},
            (1, 0): {"N", "ND"},
            (0, 1): {"DN"},
            (0, 0): {"ND"},
        },
        output_dist={
            (1, 1): {"N": 0.5, "DN": 0.5},
            (1, 0): {"N": 0.5, "ND": 0.5},
            (0, 1): {"DN": 1.0},
            (0, 0): {"ND": 1.0},
        },
    )


PRESETS = {"det-noun": det_noun_spec}


@dataclass(frozen=True, eq=False)
class ParamState:
    """Parameter probabilities: a learner's coins xi, or the
    population-level probabilities x of the environment."""

    xi: np.ndarray
    gamma: float = 0.0

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=np.float64)
        if xi.ndim != 1 or xi.size < 1:
            raise ValueError("xi must be a 1-d vector")
        if np.any(xi < 0.0) or np.any(xi > 1.0):
            raise ValueError("parameter probabilities must lie in [0, 1]")
        xi = xi.copy()
        xi.flags.writeable = False
        object.__setattr__(self, "xi", xi)

    @property
    def n(self) -> int:
        return self.xi.size


def _as_param_state(x, num_params: int) -> ParamState:
    state = x if isinstance(x, ParamState) else ParamState(x)
    if state.n != num_params:
        raise ValueError(f"expected {num_params} parameters, got {state.n}")
    return state


def grammar_distribution(x) -> np.ndarray:
    """P(G_sigma) = prod_i x_i^sigma_i (1-x_i)^(1-sigma_i), in canonical
    grammar order; sums to 1."""
    state = x if isinstance(x, ParamState) else ParamState(x)
    xi = state.xi
    out = np.empty(2 ** state.n)
    for idx, sigma in enumerate(grammar_order(state.n)):
        prob = 1.0
        for i, b in enumerate(sigma):
            prob *= xi[i] if b else 1.0 - xi[i]
        out[idx] = prob
    return out


def string_distribution(spec: ToyUGSpec, x) -> np.ndarray:
    """Input-string distribution of a population at parameter state x:
    the grammar-probability mixture of the output distributions."""
    state = _as_param_state(x, spec.num_params)
    probs = grammar_distribution(state)
    out = np.zeros(len(spec.strings))
    index = {s: i for i, s in enumerate(spec.strings)}
    for pg, sigma in zip(probs, spec.grammars):
        for s, w in spec.output_dist[sigma].items():
            out[index[s]] += pg * w
    return out


def npl_penalties(spec: ToyUGSpec, x) -> PenaltyVector:
    """Penalty probability of each grammar against the population x:
    total probability of strings the grammar fails to parse, in
    canonical grammar order."""
    strings_dist = string_distribution(spec, x)
    values = np.empty(2 ** spec.num_params)
    for idx, sigma in enumerate(spec.grammars):
        parsed = spec.parse_table[sigma]
        values[idx] = sum(
            w for s, w in zip(spec.strings, strings_dist) if s not in parsed)
    return PenaltyVector(values)


def npl_update(s: ParamState, sigma, parsed: bool) -> ParamState:
    """One reward-penalty step on the parameter coins: each coin moves
    toward the value it had in sigma on success, away from it on
    failure.  Expressions match the batched kernel bit for bit."""
    sigma = np.asarray(sigma)
    if sigma.shape != (s.n,):
        raise ValueError("sigma length does not match parameter count")
    if not np.all((sigma == 0) | (sigma == 1)):
        raise ValueError("sigma must be a 0/1 vector")
    g = s.gamma
    xi = s.xi
    toward = sigma == 1 if parsed else sigma == 0
    new = np.where(toward, xi + g * (1.0 - xi), (1.0 - g) * xi)
    return ParamState(new, g)


def simulate_npl_ensemble(spec: ToyUGSpec, x, gamma: float, T: int,
                          learners: int, seed: int) -> np.ndarray:
    """Final parameter coins of `learners` independent learners exposed
    to T tokens from the stationary population x; (learners, N) array.

    Each token consumes one uniform per parameter (grammar choice,
    in parameter order) and then one for the input string.
    """
    state = _as_param_state(x, spec.num_params)
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    if T < 1:
        raise ValueError("need at least 1 token")
    if learners < 1:
        raise ValueError("need at least 1 learner")
    scum = np.cumsum(string_distribution(spec, state))
    rng_states = _kernels.init_states(_kernels.member_seeds(seed, learners))
    xi = np.full((spec.num_params, learners), 0.5)
    _kernels.npl_ensemble_kernel(spec.parse_rows(), scum, gamma, T,
                                 rng_states, xi)
    return xi.T.copy()


def simulate_npl_learner(spec: ToyUGSpec, x, gamma: float, T: int,
                         seed: int) -> ParamState:
    """One learner, coins initialized to 0.5, against the stationary
    population x.  Deterministic given seed."""
    xi = simulate_npl_ensemble(spec, x, gamma, T, 1, seed)
    return ParamState(xi[0], gamma)


def npl_generations(spec: ToyUGSpec, x0, generations: int, gamma: float,
                    T: int, learners: int, seed: int,
                    collect_learners: bool = False):
    """Generation chain: each cohort of learners acquires from the
    current population state, and the ensemble mean of their final
    coins becomes the next population state.  Returns the sequence
    [x0, x1, ..., x_generations]; with collect_learners also returns
    the per-cohort (learners, num_params) final-coin arrays."""
    state = _as_param_state(x0, spec.num_params)
    if generations < 0:
        raise ValueError("generations must be nonnegative")
    if generations == 0:
        return ([state], []) if collect_learners else [state]
    if learners < 1:
        raise ValueError("need at least 1 learner")
    all_seeds = _kernels.member_seeds(seed, generations * learners)
    all_seeds = all_seeds.reshape(generations, learners)
    out = [state]
    cohorts = []
    for t in range(generations):
        scum = np.cumsum(string_distribution(spec, state))
        rng_states = _kernels.init_states(all_seeds[t])
        xi = np.full((spec.num_params, learners), 0.5)
        _kernels.npl_ensemble_kernel(spec.parse_rows(), scum, gamma, T,
                                     rng_states, xi)
        if collect_learners:
            cohorts.append(xi.T.copy())
        state = ParamState(xi.mean(axis=1), gamma)
        out.append(state)
    return (out, cohorts) if collect_learners else out
