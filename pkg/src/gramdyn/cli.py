"""Command-line front end.

Subcommands map one-to-one onto library operations:

  simulate   deterministic map trajectory, or stochastic generations
  learn      final states of an ensemble of reward-penalty learners
  analyze    rest points with stability classification
  sweep      bifurcation sweep over the advantage ratio rho
  npl        parameter-learner generation chain on a preset space
  explore    conjecture fuzzing over random proper systems
  rerun      re-execute a previously echoed resolved config

Every output embeds the fully resolved run config (JSON header comment
in CSV, "config" field in JSON), including seed and version, so any
output can be reproduced byte for byte with `rerun`.  Exit codes:
0 success (numerical non-convergence is a warning, not a failure),
2 usage error, 3 data error (unreadable or inadmissible matrix input).
"""

import argparse
import json
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from .advantage import (
    AdvantageMatrix,
    babelian,
    matrix_from_dict,
    quasi_babelian,
    symmetric,
    two_grammar,
)
from .dynamics import generational_simulation, simulate_lrp_ensemble, trajectory
from .npl import PRESETS, ParamState, npl_generations, simulate_npl_ensemble
from .simplex import PopulationState
from .stability import bifurcation_sweep, conjecture_explore, find_rest_points

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3

MATRIX_CLASSES = {
    "two-grammar": (2, lambda p: two_grammar(*p)),
    "babelian": (2, lambda p: babelian(int(p[0]), p[1])),
    "symmetric": (3, lambda p: symmetric(*p)),
    "quasi-babelian": (2, lambda p: quasi_babelian(*p)),
}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run parameters; the reproducibility unit.

    matrix holds resolved entries (never a file path) so reruns do not
    depend on the original file still existing.
    """

    subcommand: str
    seed: int = 0
    format: str = "csv"
    version: str = __version__
    matrix: dict | None = None
    start: list | None = None
    generations: int | None = None
    gamma: float | None = None
    tokens: int | None = None
    learners: int | None = None
    stochastic: bool = False
    ternary: bool = False
    preset: str | None = None
    trials: int | None = None
    n: int | None = None
    a: float | None = None
    rho_grid: list | None = None
    burn_in: int | None = None
    tol: float | None = None

    def resolved(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if f.name in ("stochastic", "ternary") and not value:
                continue
            out[f.name] = value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict) or "subcommand" not in data:
            raise DataError("config must be a JSON object with a 'subcommand'")
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise DataError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)


# -- argument handling -------------------------------------------------

def _parse_floats(text: str, what: str) -> list:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise UsageError(f"could not parse {what} {text!r} as comma-separated reals")


def _resolve_matrix(matrix_arg, class_arg, params_arg) -> dict:
    """Turn --matrix/--class into resolved entries.  Exactly one source."""
    if (matrix_arg is None) == (class_arg is None):
        raise UsageError("exactly one matrix source required: --matrix or --class/--params")
    if class_arg is not None:
        if params_arg is None:
            raise UsageError("--class requires --params")
        name, params = class_arg, _parse_floats(params_arg, "--params")
    else:
        head, sep, tail = matrix_arg.partition(":")
        if sep and head in MATRIX_CLASSES:
            name, params = head, _parse_floats(tail, "matrix parameters")
        else:
            return _load_matrix_file(matrix_arg)
    if name not in MATRIX_CLASSES:
        raise UsageError(
            f"unknown matrix class {name!r}; choices: {sorted(MATRIX_CLASSES)}")
    arity, build = MATRIX_CLASSES[name]
    if len(params) != arity:
        raise UsageError(f"matrix class {name!r} takes {arity} parameters")
    try:
        matrix = build(params)
    except ValueError as e:
        raise DataError(f"inadmissible {name} parameters: {e}")
    return {"n": matrix.n, "entries": [[float(x) for x in row] for row in matrix.entries]}


def _load_matrix_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as e:
        raise DataError(f"cannot read matrix file {path!r}: {e}")
    except json.JSONDecodeError as e:
        raise DataError(f"matrix file {path!r} is not valid JSON: {e}")
    try:
        matrix = matrix_from_dict(data)
    except ValueError as e:
        raise DataError(f"matrix file {path!r}: {e}")
    return {"n": matrix.n, "entries": [[float(x) for x in row] for row in matrix.entries]}


def _matrix_of(config: RunConfig) -> AdvantageMatrix:
    if not isinstance(config.matrix, dict) or "entries" not in config.matrix:
        raise DataError("config matrix must be an object with 'entries'")
    try:
        return AdvantageMatrix(np.asarray(config.matrix["entries"], dtype=np.float64))
    except ValueError as e:
        raise DataError(str(e))


def _state_of(config: RunConfig) -> PopulationState:
    if config.start is None:
        return PopulationState.uniform(config.matrix["n"])
    try:
        return PopulationState(np.asarray(config.start, dtype=np.float64))
    except ValueError as e:
        raise UsageError(f"bad --start: {e}")


def parse_grid(text: str) -> list:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("grid must be start:stop:step")
    try:
        start, stop, step = (float(x) for x in parts)
    except ValueError:
        raise UsageError(f"could not parse grid {text!r}")
    if step <= 0.0 or stop < start:
        raise UsageError("grid needs step > 0 and stop >= start")
    return [start, stop, step]


def grid_values(spec3) -> np.ndarray:
    """Inclusive arithmetic grid: endpoints captured within half a step."""
    start, stop, step = spec3
    count = int(np.floor((stop - start) / step + 0.5)) + 1
    values = start + step * np.arange(count)
    # snap a rounding-error overshoot back onto the requested endpoint
    if count >= 2 and abs(values[-1] - stop) <= 1e-9 * step:
        values[-1] = stop
    return values


def _need(config: RunConfig, *names):
    for name in names:
        if getattr(config, name) is None:
            raise DataError(f"config for {config.subcommand!r} is missing {name!r}")


def _require(cond: bool, message: str):
    if not cond:
        raise UsageError(message)


# -- output helpers ----------------------------------------------------

def _fmt(x) -> str:
    return format(float(x), ".17g")


def _config_json(config: RunConfig) -> str:
    return json.dumps(config.resolved(), sort_keys=True, separators=(",", ":"))


def _csv_document(config: RunConfig, header, rows, footers=()) -> str:
    lines = ["# config " + _config_json(config), ",".join(header)]
    lines.extend(",".join(_fmt(x) if not isinstance(x, str) else x for x in row)
                 for row in rows)
    lines.extend(footers)
    return "\n".join(lines) + "\n"


def _json_document(config: RunConfig, payload: dict) -> str:
    return json.dumps({"config": config.resolved(), **payload},
                      sort_keys=True, indent=2) + "\n"


def _emit(text: str, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)


# -- subcommand implementations ----------------------------------------

def _run_simulate(config: RunConfig, out_path):
    _need(config, "matrix", "generations")
    if config.stochastic:
        _need(config, "gamma", "tokens", "learners")
    matrix = _matrix_of(config)
    state = _state_of(config)
    if config.ternary and matrix.n != 3:
        raise UsageError("--ternary requires a 3-grammar system")
    if config.stochastic:
        traj = generational_simulation(
            matrix, state, config.generations, config.gamma, config.tokens,
            config.learners, config.seed)
    else:
        traj = trajectory(matrix, state, config.generations)
    arr = traj.as_array()
    header = ["generation"] + [f"p{i+1}" for i in range(matrix.n)]
    rows = [[str(t)] + list(p) for t, p in enumerate(arr)]
    payload = {"states": [[float(x) for x in p] for p in arr]}
    if config.ternary:
        tern = np.column_stack((arr[:, 1] + 0.5 * arr[:, 2],
                                (np.sqrt(3.0) / 2.0) * arr[:, 2]))
        header += ["tx", "ty"]
        rows = [row + list(t) for row, t in zip(rows, tern)]
        payload["ternary"] = [[float(a), float(b)] for a, b in tern]
    if config.format == "json":
        text = _json_document(config, payload)
    else:
        text = _csv_document(config, header, rows)
    _emit(text, out_path)
    final = ", ".join(_fmt(x) for x in arr[-1])
    mode = "stochastic" if config.stochastic else "deterministic"
    return EXIT_OK, f"simulate: {config.generations} {mode} generations, final p = ({final})"


def _run_learn(config: RunConfig, out_path):
    _need(config, "matrix", "gamma", "tokens", "learners")
    matrix = _matrix_of(config)
    state = _state_of(config)
    pi = simulate_lrp_ensemble(matrix, state, config.gamma, config.tokens,
                               config.learners, config.seed)
    mean = pi.mean(axis=0)
    header = ["learner"] + [f"pi{i+1}" for i in range(matrix.n)]
    rows = [[str(i)] + list(row) for i, row in enumerate(pi)]
    footer = "# pi_mean=" + ",".join(_fmt(x) for x in mean)
    if config.format == "json":
        text = _json_document(config, {
            "pi": [[float(x) for x in row] for row in pi],
            "pi_mean": [float(x) for x in mean],
        })
    else:
        text = _csv_document(config, header, rows, [footer])
    _emit(text, out_path)
    shown = ", ".join(_fmt(x) for x in mean)
    return EXIT_OK, f"learn: {config.learners} learners, mean pi = ({shown})"


def _run_analyze(config: RunConfig, out_path):
    _need(config, "matrix")
    matrix = _matrix_of(config)
    tol = config.tol if config.tol is not None else 1e-12
    reports = find_rest_points(matrix, tol=tol)
    if config.format == "csv":
        header = (["kind", "classification", "residual"]
                  + [f"p{i+1}" for i in range(matrix.n)] + ["moduli"])
        rows = [[r.kind, r.classification, _fmt(r.residual)]
                + [_fmt(x) for x in r.location.p]
                + [";".join(_fmt(m) for m in r.eigenvalue_moduli)]
                for r in reports]
        text = _csv_document(config, header, rows)
    else:
        text = _json_document(config, {"rest_points": [r.as_dict() for r in reports]})
    _emit(text, out_path)
    interior = sum(r.kind == "interior" for r in reports)
    verdicts = ", ".join(f"{r.kind}:{r.classification}" for r in reports)
    return EXIT_OK, (f"analyze: {len(reports)} rest points "
                     f"({interior} interior) [{verdicts}]")


def _run_sweep(config: RunConfig, out_path):
    _need(config, "a", "rho_grid", "burn_in")
    if len(config.rho_grid) != 3:
        raise DataError("rho_grid must be [start, stop, step]")
    grid = grid_values(config.rho_grid)
    start = None if config.start is None else _state_of_list(config.start)
    try:
        diagram = bifurcation_sweep(config.a, grid, config.burn_in, start)
    except ValueError as e:
        raise DataError(str(e))
    limits = diagram.limits()
    estimate = diagram.bifurcation_estimate
    est_text = _fmt(estimate) if not np.isnan(estimate) else "nan"
    if config.format == "json":
        text = _json_document(config, {
            "rho": [float(x) for x in diagram.rho_values],
            "limits": [[float(x) for x in p] for p in limits],
            "residuals": [float(x) for x in diagram.residuals],
            "converged": [bool(x) for x in diagram.converged],
            "bifurcation_estimate": None if np.isnan(estimate) else float(estimate),
        })
    else:
        header = ["rho", "p1", "p2", "p3"]
        rows = [[r] + list(p) for r, p in zip(diagram.rho_values, limits)]
        text = _csv_document(config, header, rows,
                             [f"# bifurcation_estimate={est_text}"])
    _emit(text, out_path)
    stray = int((~diagram.converged).sum())
    summary = f"sweep: {grid.size} rho values, bifurcation_estimate={est_text}"
    if stray:
        summary += f" (warning: {stray} grid points did not reach the step tolerance)"
    return EXIT_OK, summary


def _state_of_list(values) -> PopulationState:
    try:
        return PopulationState(np.asarray(values, dtype=np.float64))
    except ValueError as e:
        raise UsageError(f"bad --start: {e}")


def _run_npl(config: RunConfig, out_path, dump_path=None):
    _need(config, "preset", "start", "generations", "gamma", "tokens", "learners")
    if config.preset not in PRESETS:
        raise DataError(f"unknown preset {config.preset!r}")
    spec = PRESETS[config.preset]()
    try:
        x0 = ParamState(np.asarray(config.start, dtype=np.float64))
    except ValueError as e:
        raise UsageError(f"bad --start: {e}")
    states, cohorts = npl_generations(spec, x0, config.generations, config.gamma,
                                      config.tokens, config.learners, config.seed,
                                      collect_learners=True)
    arr = np.array([s.xi for s in states])
    header = ["generation"] + [f"x{i+1}" for i in range(spec.num_params)]
    rows = [[str(t)] + list(x) for t, x in enumerate(arr)]
    if config.format == "json":
        text = _json_document(config, {"states": [[float(v) for v in x] for x in arr]})
    else:
        text = _csv_document(config, header, rows)
    _emit(text, out_path)
    if dump_path is not None:
        header = (["generation", "learner"]
                  + [f"xi{i+1}" for i in range(spec.num_params)])
        dump_rows = [[str(t + 1), str(i)] + list(coins)
                     for t, cohort in enumerate(cohorts)
                     for i, coins in enumerate(cohort)]
        _emit(_csv_document(config, header, dump_rows), dump_path)
    final = ", ".join(_fmt(v) for v in arr[-1])
    return EXIT_OK, f"npl: {config.generations} generations, final x = ({final})"


def _run_explore(config: RunConfig, out_path):
    _need(config, "trials", "n")
    report = conjecture_explore(config.trials, config.seed, config.n)
    payload = report.as_dict()
    if config.format == "json":
        text = _json_document(config, payload)
    else:
        rows = [
            ["trials", str(report.trials)],
            ["count_n", str(report.rest_point_counts["n"])],
            ["count_n_plus_1", str(report.rest_point_counts["n_plus_1"])],
            ["count_other", str(report.rest_point_counts["other"])],
            ["interior_stable", str(report.interior_stable_count)],
            ["interior_unstable", str(report.interior_unstable_count)],
            ["interior_inconclusive", str(report.interior_inconclusive_count)],
            ["counterexample_count", str(len(report.counterexamples))],
        ]
        footers = ["# counterexample " + json.dumps(c, sort_keys=True,
                                                    separators=(",", ":"))
                   for c in payload["counterexamples"]]
        text = _csv_document(config, ["key", "value"], rows, footers)
    _emit(text, out_path)
    c = report.rest_point_counts
    summary = (f"explore: {report.trials} trials, counts n={c['n']} "
               f"n+1={c['n_plus_1']} other={c['other']}, interior "
               f"stable={report.interior_stable_count} "
               f"unstable={report.interior_unstable_count} "
               f"inconclusive={report.interior_inconclusive_count}")
    if report.counterexamples:
        summary += f" (warning: {len(report.counterexamples)} counterexample records)"
    return EXIT_OK, summary


def run(config: RunConfig, out_path=None, dump_path=None):
    """Execute a resolved config.  Returns (exit_code, summary)."""
    if config.subcommand == "simulate":
        return _run_simulate(config, out_path)
    if config.subcommand == "learn":
        return _run_learn(config, out_path)
    if config.subcommand == "analyze":
        return _run_analyze(config, out_path)
    if config.subcommand == "sweep":
        return _run_sweep(config, out_path)
    if config.subcommand == "npl":
        return _run_npl(config, out_path, dump_path)
    if config.subcommand == "explore":
        return _run_explore(config, out_path)
    raise UsageError(f"unknown subcommand {config.subcommand!r}")


# -- parser ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gramdyn",
        description="Learning dynamics of competing grammars.")
    parser.add_argument("--version", action="version", version=f"gramdyn {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, default_format="csv"):
        p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=default_format)

    def add_matrix_source(p):
        p.add_argument("--matrix", default=None,
                       help="matrix file, or class spec like two-grammar:0.2,0.1")
        p.add_argument("--class", dest="klass", default=None,
                       choices=sorted(MATRIX_CLASSES),
                       help="matrix class (with --params)")
        p.add_argument("--params", default=None,
                       help="comma-separated class parameters")

    p = sub.add_parser("simulate", help="iterate the inter-generational map")
    add_matrix_source(p)
    p.add_argument("--start", default=None, help="initial state, comma-separated")
    p.add_argument("--generations", type=int, default=30)
    p.add_argument("--stochastic", action="store_true",
                   help="simulate finite learner generations instead of the map")
    p.add_argument("--gamma", type=float, default=0.001)
    p.add_argument("--tokens", type=int, default=10 ** 6)
    p.add_argument("--learners", type=int, default=1)
    p.add_argument("--ternary", action="store_true",
                   help="add ternary projection columns (3-grammar only)")
    add_common(p)

    p = sub.add_parser("learn", help="run an ensemble of reward-penalty learners")
    add_matrix_source(p)
    p.add_argument("--start", default=None,
                   help="environment mixture, comma-separated (default uniform)")
    p.add_argument("--gamma", type=float, default=0.001)
    p.add_argument("--tokens", type=int, default=10 ** 6)
    p.add_argument("--learners", type=int, default=1)
    add_common(p)

    p = sub.add_parser("analyze", help="locate and classify rest points")
    add_matrix_source(p)
    p.add_argument("--tol", type=float, default=None, help="Newton tolerance")
    add_common(p, default_format="json")

    p = sub.add_parser("sweep", help="bifurcation sweep over rho")
    p.add_argument("--a", type=float, required=True, help="base advantage")
    p.add_argument("--rho-grid", required=True, help="grid start:stop:step")
    p.add_argument("--burn-in", type=int, default=10 ** 4)
    p.add_argument("--start", default=None, help="initial state, comma-separated")
    add_common(p)

    p = sub.add_parser("npl", help="parameter-learner generation chain")
    p.add_argument("--preset", choices=sorted(PRESETS), default="det-noun")
    p.add_argument("--start", required=True,
                   help="population parameter probabilities, comma-separated")
    p.add_argument("--generations", type=int, default=30)
    p.add_argument("--gamma", type=float, default=0.01)
    p.add_argument("--tokens", type=int, default=10 ** 5)
    p.add_argument("--learners", type=int, default=100)
    p.add_argument("--dump-learners", default=None,
                   help="also write per-learner coins to this CSV path")
    add_common(p)

    p = sub.add_parser("explore", help="fuzz the rest-point conjectures")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--n", type=int, default=3, help="number of grammars")
    add_common(p, default_format="json")

    p = sub.add_parser("rerun", help="re-execute an echoed resolved config")
    p.add_argument("config", help="path to a resolved config JSON file")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--dump-learners", default=None)
    return parser


def _positive_int(value, what) -> int:
    _require(value >= 1, f"{what} must be at least 1")
    return int(value)


def resolve_config(args) -> RunConfig:
    sc = args.subcommand
    common = dict(subcommand=sc, seed=args.seed, format=args.format,
                  version=__version__)
    if sc == "simulate":
        matrix = _resolve_matrix(args.matrix, args.klass, args.params)
        start = None if args.start is None else _parse_floats(args.start, "--start")
        extra = {}
        if args.stochastic:
            _require(0.0 < args.gamma < 1.0, "--gamma must lie in (0, 1)")
            extra = dict(stochastic=True, gamma=args.gamma,
                         tokens=_positive_int(args.tokens, "--tokens"),
                         learners=_positive_int(args.learners, "--learners"))
        return RunConfig(matrix=matrix, start=start,
                         generations=_positive_int(args.generations, "--generations"),
                         ternary=args.ternary, **extra, **common)
    if sc == "learn":
        matrix = _resolve_matrix(args.matrix, args.klass, args.params)
        start = None if args.start is None else _parse_floats(args.start, "--start")
        _require(0.0 < args.gamma < 1.0, "--gamma must lie in (0, 1)")
        return RunConfig(matrix=matrix, start=start, gamma=args.gamma,
                         tokens=_positive_int(args.tokens, "--tokens"),
                         learners=_positive_int(args.learners, "--learners"),
                         **common)
    if sc == "analyze":
        matrix = _resolve_matrix(args.matrix, args.klass, args.params)
        if args.tol is not None:
            _require(args.tol > 0.0, "--tol must be positive")
        return RunConfig(matrix=matrix, tol=args.tol, **common)
    if sc == "sweep":
        _require(args.a > 0.0, "--a must be positive")
        start = None if args.start is None else _parse_floats(args.start, "--start")
        return RunConfig(a=args.a, rho_grid=parse_grid(args.rho_grid),
                         burn_in=_positive_int(args.burn_in, "--burn-in"),
                         start=start, **common)
    if sc == "npl":
        _require(0.0 < args.gamma < 1.0, "--gamma must lie in (0, 1)")
        _require(args.generations >= 0, "--generations must be nonnegative")
        return RunConfig(preset=args.preset,
                         start=_parse_floats(args.start, "--start"),
                         generations=args.generations, gamma=args.gamma,
                         tokens=_positive_int(args.tokens, "--tokens"),
                         learners=_positive_int(args.learners, "--learners"),
                         **common)
    if sc == "explore":
        return RunConfig(trials=_positive_int(args.trials, "--trials"),
                         n=args.n, **common)
    raise UsageError(f"unknown subcommand {sc!r}")


def _load_config_file(path: str) -> RunConfig:
    """Accepts a bare config JSON, a JSON output document (config field),
    or a CSV output whose first line is the config header comment."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise DataError(f"cannot read config {path!r}: {e}")
    first = text.partition("\n")[0]
    if first.startswith("# config "):
        payload = first[len("# config "):]
    else:
        payload = text
    try:
        data = json.loads(payload)
    except json.JSONDecodeError as e:
        raise DataError(f"config {path!r} is not valid JSON: {e}")
    if isinstance(data, dict) and "config" in data and "subcommand" not in data:
        data = data["config"]
    config = RunConfig.from_dict(data)
    if config.version != __version__:
        print(f"warning: config was produced by version {config.version}, "
              f"running {__version__}; outputs may differ", file=sys.stderr)
    return config


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.subcommand == "rerun":
            config = _load_config_file(args.config)
            dump = args.dump_learners
        else:
            config = resolve_config(args)
            dump = getattr(args, "dump_learners", None)
        code, summary = run(config, args.out, dump)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    stream = sys.stdout if args.out is not None else sys.stderr
    print(summary, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
