"""Rest points of the inter-generational map and their stability.

The simplex is (n-1)-dimensional, so stability is judged in the chart
(p_1, ..., p_{n-1}) with p_n = 1 - sum: the Jacobian of the reduced map
drops the dynamically meaningless ambient direction.  A rest point is
asymptotically stable when every chart eigenvalue modulus is below 1.

Interior rest points are exactly the solutions of
    c_1 p_1 = c_2 p_2 = ... = c_n p_n
with c the penalty vector, located here by damped Newton iteration on
the residual r_i = c_i p_i - c_n p_n from quasi-random interior starts.
"""

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .advantage import AdvantageMatrix, quasi_babelian, from_regions, RegionMeasure, _subsets
from .dynamics import map_formula, reliable_map, _require_proper, _raw_penalties
from .simplex import PopulationState, as_state, spacings_to_simplex

__all__ = [
    "ConjectureReport",
    "OrbitDiagram",
    "RestPointReport",
    "analytic_rest_point",
    "bifurcation_sweep",
    "chart_jacobian",
    "classify_moduli",
    "conjecture_explore",
    "eigen_moduli",
    "find_rest_points",
]

CLASSIFICATION_MARGIN = 1e-7
DEDUP_TOL = 1e-8
INTERIOR_CUTOFF = 1e-7


def chart_jacobian(matrix: AdvantageMatrix, p, h: float = 1e-6) -> np.ndarray:
    """Finite-difference Jacobian of the reduced map at p.

    Central differences, switching to one-sided when a chart coordinate
    sits within h of 0 or 1.  Perturbed points may leave the simplex by
    O(h); the map formula extends smoothly there.
    """
    if h <= 0.0:
        raise ValueError("step h must be positive")
    _require_proper(matrix)
    state = as_state(p)
    if state.n != matrix.n:
        raise ValueError("dimension mismatch between matrix and state")
    entries = matrix.entries
    n = state.n
    u0 = state.p[: n - 1]

    def reduced(u):
        full = np.concatenate((u, (1.0 - u.sum(),)))
        return map_formula(entries, full)[: n - 1]

    jac = np.empty((n - 1, n - 1))
    f0 = None
    for j in range(n - 1):
        if u0[j] <= h or u0[j] >= 1.0 - h:
            # second-order one-sided stencil; both probes stay on the
            # inward side, matching the central branch's O(h^2) error
            if f0 is None:
                f0 = reduced(u0)
            step = h if u0[j] <= h else -h
            up = u0.copy()
            up[j] += step
            up2 = u0.copy()
            up2[j] += 2.0 * step
            jac[:, j] = (-3.0 * f0 + 4.0 * reduced(up) - reduced(up2)) / (2.0 * step)
        else:
            up = u0.copy()
            up[j] += h
            dn = u0.copy()
            dn[j] -= h
            jac[:, j] = (reduced(up) - reduced(dn)) / (2.0 * h)
    return jac


def eigen_moduli(m: np.ndarray) -> np.ndarray:
    """Eigenvalue moduli, sorted descending."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("need a square matrix")
    return np.sort(np.abs(np.linalg.eigvals(m)))[::-1]


def classify_moduli(moduli, margin: float = CLASSIFICATION_MARGIN) -> str:
    """Stability verdict from chart eigenvalue moduli.

    Moduli within margin of 1 are inconclusive rather than guessed:
    margin reflects the finite-difference noise floor.
    """
    moduli = np.asarray(moduli)
    if np.any(moduli > 1.0 + margin):
        return "unstable"
    if np.all(moduli < 1.0 - margin):
        return "asymptotically-stable"
    return "inconclusive"


@dataclass(frozen=True, eq=False)
class RestPointReport:
    """A located rest point with its chart spectrum and verdict.

    residual is max_i |c_i p_i - mean_j c_j p_j| for interior points
    and max |p' - p| otherwise.
    """

    location: PopulationState
    kind: str
    residual: float
    eigenvalue_moduli: np.ndarray
    classification: str

    def as_dict(self) -> dict:
        return {
            "location": [float(x) for x in self.location.p],
            "kind": self.kind,
            "residual": float(self.residual),
            "eigenvalue_moduli": [float(x) for x in self.eigenvalue_moduli],
            "classification": self.classification,
        }


def _report(matrix, state, residual, margin) -> RestPointReport:
    moduli = eigen_moduli(chart_jacobian(matrix, state))
    return RestPointReport(state, state.classify(), float(residual),
                           moduli, classify_moduli(moduli, margin))


def _quasi_random_starts(n: int, count: int) -> np.ndarray:
    """Low-discrepancy interior starts: Halton points mapped to the
    simplex through sorted-uniform spacings."""
    sampler = qmc.Halton(d=n - 1, scramble=False)
    sampler.fast_forward(1)  # index 0 is the all-zero corner
    raw = sampler.random(count)
    return np.array([spacings_to_simplex(row) for row in raw])


def _newton_interior(entries: np.ndarray, p0: np.ndarray, tol: float,
                     max_iter: int = 200) -> np.ndarray | None:
    """Damped Newton on r_i = c_i p_i - c_n p_n in chart coordinates.

    Iterates are clamped to the simplex shrunk by 1e-12 so penalties
    stay positive.  Returns the full simplex point or None.
    """
    n = entries.shape[0]
    last = n - 1

    def embed(u):
        return np.concatenate((u, (1.0 - u.sum(),)))

    def clamp(u):
        p = np.clip(embed(u), 1e-12, None)
        p /= p.sum()
        return p[:last]

    def residual(u):
        p = embed(u)
        c = entries @ p - np.diagonal(entries) * p
        cp = c * p
        return cp[:last] - cp[last], p, c

    u = np.asarray(p0, dtype=np.float64)[:last]
    f, p, c = residual(u)
    for _ in range(max_iter):
        if np.max(np.abs(f)) < tol:
            return embed(u)
        jac = np.empty((last, last))
        for i in range(last):
            for j in range(last):
                jac[i, j] = (p[i] * (entries[i, j] - entries[i, last])
                             - p[last] * entries[last, j] + c[last])
                if i == j:
                    jac[i, j] += c[i]
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            return None
        norm0 = np.linalg.norm(f)
        t = 1.0
        for _ in range(30):
            u_try = clamp(u + t * step)
            f_try, p, c = residual(u_try)
            if np.linalg.norm(f_try) < norm0:
                break
            t *= 0.5
        else:
            return None
        u, f = u_try, f_try
    return embed(u) if np.max(np.abs(f)) < tol else None


def find_rest_points(matrix: AdvantageMatrix, tol: float = 1e-12,
                     starts: int = 50,
                     margin: float = CLASSIFICATION_MARGIN) -> list:
    """All rest points: the n vertices plus any interior solutions.

    Interior candidates come from damped Newton at `starts` quasi-random
    interior points, deduplicated within 1e-8; candidates that collapse
    onto the boundary (min p_i below 1e-7) are artifacts of vertex rest
    points and are dropped.  Finding no interior solution is a result,
    not an error.
    """
    _require_proper(matrix)
    n = matrix.n
    entries = matrix.entries
    reports = []
    for i in range(n):
        v = PopulationState.vertex(n, i)
        resid = np.max(np.abs(reliable_map(matrix, v).p - v.p))
        reports.append(_report(matrix, v, resid, margin))

    solutions = []
    for p0 in _quasi_random_starts(n, starts):
        sol = _newton_interior(entries, p0, tol)
        if sol is None or sol.min() < INTERIOR_CUTOFF:
            continue
        if any(np.max(np.abs(sol - q)) <= DEDUP_TOL for q in solutions):
            continue
        solutions.append(sol)
    solutions.sort(key=tuple)
    for sol in solutions:
        state = PopulationState(sol)
        cp = _raw_penalties(entries, state.p) * state.p
        resid = np.max(np.abs(cp - cp.mean()))
        reports.append(_report(matrix, state, resid, margin))
    return reports


def analytic_rest_point(kind: str, params) -> PopulationState | None:
    """Closed-form interior rest point for a named matrix class.

    params are the constructor arguments of the class: babelian (n, a),
    symmetric (a, b, c), quasi-babelian (a, b).  Quasi-Babelian systems
    with rho = b/a >= 2 have no interior rest point: returns None.
    """
    kind = kind.replace("_", "-").lower()
    params = [float(x) for x in np.atleast_1d(np.asarray(params, dtype=np.float64))]
    if kind == "babelian":
        n, a = int(params[0]), params[1]
        if a <= 0.0 or n < 2:
            raise ValueError("babelian needs n >= 2, a > 0")
        return PopulationState.uniform(n)
    if kind == "symmetric":
        a, b, c = params
        if min(a, b, c) <= 0.0:
            raise ValueError("symmetric needs positive advantages")
        d = a + b + c
        return PopulationState(np.array([c, b, a]) / d)
    if kind == "quasi-babelian":
        a, b = params
        if min(a, b) <= 0.0:
            raise ValueError("quasi-babelian needs positive advantages")
        rho = b / a
        if rho >= 2.0:
            return None
        d = 5.0 - 2.0 * rho
        return PopulationState(np.array([1.0, 2.0 - rho, 2.0 - rho]) / d)
    raise ValueError(f"unknown matrix class {kind!r}")


@dataclass(frozen=True, eq=False)
class OrbitDiagram:
    """Limit of the dynamics per advantage ratio rho.

    converged marks grid points whose iteration hit the 1e-12 step
    criterion within the burn-in; exactly at the rho = 2 transition the
    approach is algebraic and the default burn-in leaves a residual of
    order 1e-8, reported honestly rather than suppressed.
    """

    rho_values: np.ndarray
    limit_states: tuple
    bifurcation_estimate: float
    residuals: np.ndarray
    converged: np.ndarray

    def limits(self) -> np.ndarray:
        return np.array([s.p for s in self.limit_states])


def bifurcation_sweep(a: float, rho_grid, burn_in: int = 10_000,
                      start=None) -> OrbitDiagram:
    """Iterate the one-advantaged-grammar family over a grid of rho.

    For each rho the map for quasi_babelian(a, rho*a) is iterated from
    `start` (default the near-takeover point (0.98, 0.01, 0.01)) until
    successive states differ by < 1e-12 or burn_in is reached.  The
    takeover threshold estimate is the smallest grid rho whose limit
    has p_1 > 1 - 1e-6 (nan if none).
    """
    rho_grid = np.asarray(rho_grid, dtype=np.float64)
    if rho_grid.size == 0:
        raise ValueError("rho grid is empty")
    if np.any(rho_grid <= 0.0) or np.any(rho_grid > 4.0):
        raise ValueError("rho grid must lie within (0, 4]")
    if burn_in < 1:
        raise ValueError("burn_in must be positive")
    state0 = as_state(start) if start is not None else PopulationState(
        np.array([0.98, 0.01, 0.01]))
    limits = []
    residuals = np.empty(rho_grid.size)
    converged = np.zeros(rho_grid.size, dtype=bool)
    estimate = np.nan
    for idx, rho in enumerate(rho_grid):
        matrix = quasi_babelian(a, rho * a)
        p = state0
        for _ in range(burn_in):
            p_next = reliable_map(matrix, p)
            done = np.max(np.abs(p_next.p - p.p)) < 1e-12
            p = p_next
            if done:
                converged[idx] = True
                break
        residuals[idx] = np.max(np.abs(reliable_map(matrix, p).p - p.p))
        limits.append(p)
        if np.isnan(estimate) and p.p[0] > 1.0 - 1e-6:
            estimate = float(rho)
    return OrbitDiagram(rho_grid, tuple(limits), estimate, residuals, converged)


@dataclass(frozen=True, eq=False)
class ConjectureReport:
    """Fuzzing tally for the rest-point-count and interior-stability
    conjectures.  Reported, never asserted: the conjectures are open."""

    trials: int
    rest_point_counts: dict
    interior_stable_count: int
    interior_unstable_count: int
    interior_inconclusive_count: int
    counterexamples: tuple

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "rest_point_counts": dict(self.rest_point_counts),
            "interior_stable_count": self.interior_stable_count,
            "interior_unstable_count": self.interior_unstable_count,
            "interior_inconclusive_count": self.interior_inconclusive_count,
            "counterexamples": [
                {"entries": [[float(x) for x in row] for row in m.entries],
                 "report": r.as_dict()}
                for m, r in self.counterexamples
            ],
        }


def _random_proper_matrix(n: int, rng: np.random.Generator) -> AdvantageMatrix:
    # uniform measure over the 2^n - 1 region weights; properness holds
    # almost surely, retry on the measure-zero failures
    subsets = _subsets(n)
    for _ in range(100):
        w = spacings_to_simplex(rng.random(len(subsets) - 1))
        matrix = from_regions(RegionMeasure(n, dict(zip(subsets, w))))
        if matrix.proper:
            return matrix
    raise RuntimeError("failed to sample a proper matrix in 100 draws")


def conjecture_explore(trials: int, seed: int, n: int = 3) -> ConjectureReport:
    """Sample proper systems via random region measures and tally rest
    points: conjectured counts are n (vertices only) or n+1 (one
    interior), with interior points asymptotically stable.

    Trials landing outside the conjectured counts, or with a
    non-stable interior point, are recorded in full as counterexamples.
    """
    if trials < 1:
        raise ValueError("need at least 1 trial")
    rng = np.random.default_rng(seed)
    counts = {"n": 0, "n_plus_1": 0, "other": 0}
    stable = unstable = inconclusive = 0
    counterexamples = []
    for _ in range(trials):
        matrix = _random_proper_matrix(n, rng)
        reports = find_rest_points(matrix)
        interior = [r for r in reports if r.kind == "interior"]
        if not interior:
            counts["n"] += 1
        elif len(interior) == 1:
            counts["n_plus_1"] += 1
        else:
            counts["other"] += 1
            counterexamples.extend((matrix, r) for r in interior)
        for r in interior:
            if r.classification == "asymptotically-stable":
                stable += 1
            elif r.classification == "unstable":
                unstable += 1
                counterexamples.append((matrix, r))
            else:
                inconclusive += 1
                counterexamples.append((matrix, r))
    return ConjectureReport(trials, counts, stable, unstable, inconclusive,
                            tuple(counterexamples))
