"""Advantage matrices for competing grammars.

The advantage a_ij is the probability that a random sentence of the
shared environment is parsed by grammar G_j but not by grammar G_i, so
it is the rate at which a learner currently holding G_i gets penalized
relative to one holding G_j.  All advantages of an n-grammar system are
collected in an n x n matrix with zero diagonal.

Not every nonnegative matrix arises this way: the entries are induced
by a probability measure on the Venn regions of the parse sets, which
for n = 3 forces the cyclical balance identity
    (a_21 - a_12) + (a_32 - a_23) + (a_13 - a_31) = 0.
"""

from dataclasses import dataclass
from itertools import chain, combinations

import numpy as np

from .simplex import as_state

__all__ = [
    "AdvantageMatrix",
    "PenaltyVector",
    "RegionMeasure",
    "ValidationReport",
    "babelian",
    "from_regions",
    "matrix_from_dict",
    "penalties",
    "quasi_babelian",
    "symmetric",
    "two_grammar",
    "validate",
]

BALANCE_TOL = 1e-12
MEASURE_SUM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ValidationReport:
    """Outcome of structural checks on a candidate advantage matrix.

    violations is a tuple of (rule, indices, residual) triples.
    """

    ok: bool
    proper: bool
    violations: tuple

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        return "; ".join(
            f"{rule} at {list(idx)}: residual {res!r}" if idx else f"{rule}: residual {res!r}"
            for rule, idx, res in self.violations
        )


def _check_entries(entries: np.ndarray) -> ValidationReport:
    violations = []
    n = entries.shape[0]
    diag = np.diagonal(entries)
    for i in np.nonzero(diag != 0.0)[0]:
        violations.append(("nonzero-diagonal", (int(i), int(i)), float(diag[i])))
    bad = np.argwhere((entries < 0.0) | (entries > 1.0))
    for i, j in bad:
        violations.append(("entry-outside-unit-interval", (int(i), int(j)), float(entries[i, j])))
    if n == 3:
        d = entries.T - entries
        resid = d[0, 1] + d[1, 2] + d[2, 0]
        if abs(resid) > BALANCE_TOL:
            violations.append(("cyclical-balance", (), float(resid)))
    off = entries[~np.eye(n, dtype=bool)]
    proper = bool(np.all(off > 0.0))
    return ValidationReport(not violations, proper, tuple(violations))


@dataclass(frozen=True, eq=False)
class AdvantageMatrix:
    """n x n matrix of pairwise advantages, zero diagonal.

    Construction validates by default (raises ValueError listing the
    violations).  Use AdvantageMatrix.unchecked for raw matrices, e.g.
    scaled entries when testing scale invariance of the dynamics.
    """

    entries: np.ndarray
    check: bool = True

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.float64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("entries must be a square matrix")
        if self.check:
            report = _check_entries(entries)
            if not report.ok:
                raise ValueError(f"inadmissible advantage matrix: {report.describe()}")
        entries = entries.copy()
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    @classmethod
    def unchecked(cls, entries) -> "AdvantageMatrix":
        return cls(entries, check=False)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def proper(self) -> bool:
        """All off-diagonal advantages strictly positive."""
        off = self.entries[~np.eye(self.n, dtype=bool)]
        return bool(np.all(off > 0.0))

    def __repr__(self):
        return f"AdvantageMatrix(n={self.n})"


def validate(matrix: AdvantageMatrix) -> ValidationReport:
    """Structural checks: square, zero diagonal, entries in [0, 1], and
    for n = 3 the cyclical balance identity within 1e-12."""
    return _check_entries(np.asarray(matrix.entries, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class PenaltyVector:
    """Per-grammar penalty probabilities c_i at a fixed population."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    def __getitem__(self, i):
        return self.values[i]


def penalties(matrix: AdvantageMatrix, p) -> PenaltyVector:
    """Penalty probabilities c_i = sum_{j != i} a_ij p_j.

    c_i is the probability that a speaker of G_i fails to parse a
    sentence drawn from the population mixture p.
    """
    state = as_state(p)
    entries = matrix.entries
    if state.n != entries.shape[0]:
        raise ValueError(f"population has {state.n} entries, matrix is {entries.shape[0]} x {entries.shape[0]}")
    # diagonal is zero for checked matrices; subtract it so unchecked
    # matrices still follow the j != i sum
    c = entries @ state.p - np.diagonal(entries) * state.p
    return PenaltyVector(c)


# -- region measures ---------------------------------------------------

def _subsets(n: int):
    """Nonempty subsets of {1..n} as frozensets, canonical order."""
    items = range(1, n + 1)
    return [frozenset(s) for s in chain.from_iterable(
        combinations(items, k) for k in range(1, n + 1))]


@dataclass(frozen=True, eq=False)
class RegionMeasure:
    """Probability measure on the nonempty Venn regions of n parse sets.

    weights maps frozenset subsets of {1..n} (the grammars that parse a
    region) to the probability mass of that region.  Missing subsets
    get weight 0.  Weights must lie in [0, 1] and sum to 1 within 1e-9.
    """

    n: int
    weights: dict

    def __post_init__(self):
        if self.n < 2 or self.n > 10:
            raise ValueError("region measures support 2 <= n <= 10")
        full = frozenset(range(1, self.n + 1))
        clean = {}
        for key, w in self.weights.items():
            s = frozenset(key)
            if not s or not s <= full:
                raise ValueError(f"region {set(key)} is not a nonempty subset of 1..{self.n}")
            w = float(w)
            if w < 0.0 or w > 1.0:
                raise ValueError(f"region weight {w!r} outside [0, 1]")
            clean[s] = clean.get(s, 0.0) + w
        total = sum(clean.values())
        if abs(total - 1.0) > MEASURE_SUM_TOL:
            raise ValueError(f"region weights sum to {total!r}, not 1 within {MEASURE_SUM_TOL}")
        object.__setattr__(self, "weights", clean)

    @classmethod
    def from_strings(cls, n: int, weights: dict) -> "RegionMeasure":
        """Build from keys like "1", "13", "123" (digit strings, so n <= 9)."""
        if n > 9:
            raise ValueError("digit-string regions support n <= 9")
        parsed = {}
        for key, w in weights.items():
            digits = str(key).strip()
            if not digits.isdigit():
                raise ValueError(f"region key {key!r} is not a digit string")
            s = frozenset(int(ch) for ch in digits)
            if len(digits) != len(s):
                raise ValueError(f"region key {key!r} repeats a grammar index")
            parsed[s] = parsed.get(s, 0.0) + float(w)
        return cls(n, parsed)

    def weight(self, subset) -> float:
        return self.weights.get(frozenset(subset), 0.0)


def from_regions(measure: RegionMeasure) -> AdvantageMatrix:
    """Advantage matrix induced by a region measure:
    a_ij = total mass of regions parsed by G_j but not by G_i.

    The result is always admissible (passes validate), since the
    entries come from an actual measure.
    """
    n = measure.n
    entries = np.zeros((n, n))
    for s, w in measure.weights.items():
        if w == 0.0:
            continue
        for j in s:
            for i in range(1, n + 1):
                if i not in s:
                    entries[i - 1, j - 1] += w
    return AdvantageMatrix(entries)


# -- named families ----------------------------------------------------

def two_grammar(a1: float, a2: float) -> AdvantageMatrix:
    """Two competing grammars; a1 is the advantage of G_1 over G_2
    (the penalty rate of G_2 speakers against G_1 input) and a2 the
    reverse."""
    return AdvantageMatrix([[0.0, a2], [a1, 0.0]])


def _require_positive(**params):
    for name, value in params.items():
        if not value > 0.0:
            raise ValueError(f"{name} must be positive, got {value!r}")


def babelian(n: int, a: float) -> AdvantageMatrix:
    """Fully symmetric system: every pair of distinct grammars has the
    same advantage a in both directions (mutual unintelligibility at a
    uniform rate)."""
    if n < 2:
        raise ValueError("need at least 2 grammars")
    _require_positive(a=a)
    entries = np.full((n, n), float(a))
    np.fill_diagonal(entries, 0.0)
    return AdvantageMatrix(entries)


def symmetric(a: float, b: float, c: float) -> AdvantageMatrix:
    """Three grammars with symmetric advantages a_12 = a_21 = a,
    a_13 = a_31 = b, a_23 = a_32 = c."""
    _require_positive(a=a, b=b, c=c)
    return AdvantageMatrix([
        [0.0, a, b],
        [a, 0.0, c],
        [b, c, 0.0],
    ])


def quasi_babelian(a: float, b: float) -> AdvantageMatrix:
    """Babelian system perturbed at one grammar: G_1 holds advantage b
    over G_2 and G_3 (a_21 = a_31 = b) while every other directed
    pairing keeps the base rate a.

    Admissible for any a, b in (0, 1]; the dynamics depend only on the
    ratio rho = b / a, with a takeover transition at rho = 2.
    """
    _require_positive(a=a, b=b)
    return AdvantageMatrix([
        [0.0, a, a],
        [b, 0.0, a],
        [b, a, 0.0],
    ])


# -- file format -------------------------------------------------------

def matrix_from_dict(data: dict) -> AdvantageMatrix:
    """Parse the matrix file schema.

    Exactly one of two forms:
      {"n": 3, "entries": [[0, ...], ...]}
      {"regions": {"1": 0.2, "12": 0.1, ...}, "n": 3}   (n optional)
    """
    if not isinstance(data, dict):
        raise ValueError("matrix file must contain a JSON object")
    has_entries = "entries" in data
    has_regions = "regions" in data
    if has_entries == has_regions:
        raise ValueError('matrix file needs exactly one of "entries" or "regions"')
    if has_entries:
        if "n" not in data:
            raise ValueError('matrix file with "entries" must declare "n"')
        entries = np.asarray(data["entries"], dtype=np.float64)
        if entries.shape != (data["n"], data["n"]):
            raise ValueError(f'"entries" shape {entries.shape} does not match n={data["n"]}')
        return AdvantageMatrix(entries)
    regions = data["regions"]
    if not isinstance(regions, dict) or not regions:
        raise ValueError('"regions" must be a nonempty object')
    n = data.get("n")
    if n is None:
        n = max(max(int(ch) for ch in str(key)) for key in regions)
    return from_regions(RegionMeasure.from_strings(int(n), regions))
