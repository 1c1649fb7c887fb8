"""Benchmark harness: declarative run configs, trajectory records, drift
and convergence reports, and deterministic CSV/JSON artifacts.

A run is described by a single TOML document (see ``load_config``); the
same RunConfig object drives plain trajectory runs, drift summaries, and
dt-refinement order studies.  Identical configs produce bit-identical
output files: no timestamps, no environment probes, fixed 17-digit
formatting, sorted JSON keys.
"""

import hashlib
import json
import math
import os
from dataclasses import dataclass, replace

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .birealisations import bireal_for
from .errors import (
    ConfigError,
    DomainError,
    NewtonDiverged,
    NumericalFailure,
    ParseError,
    UsageError,
)
from .expressions import diff, evaluate
from .generating import hj_coefficients
from .integrators import (
    StepConfig,
    counterexample_step,
    exact_flow,
    hj_step,
    kahan_lv_step,
    make_hj_step,
    rk4_step,
    strang,
)
from .magnus import TimeDepHamiltonian, magnus_truncate
from .poisson import from_id
from .rings import dual_lift, real_part

__all__ = [
    "RunConfig",
    "TrajectoryRecord",
    "DriftReport",
    "OrderStudyResult",
    "FixtureResult",
    "load_config",
    "config_from_mapping",
    "prepare",
    "run",
    "drift_report",
    "order_study",
    "write_trajectory",
    "write_order_study",
    "record_from_csv",
    "run_fixtures",
]

_OUTPUT_KINDS = ("trajectory", "drift", "order-study")
_EXACT_TAGS = ("harmonic", "counterexample_2d", "so3_free_rigid_body", "lv_reparam")


@dataclass
class RunConfig:
    """Validated description of one benchmark run.

    Matrices are row-major nested tuples.  ``order`` is optional and, when
    given, must match the order implied by the scheme id.  The order-study
    fields are only consulted when "order-study" is among the outputs or
    ``order_study`` is called explicitly.
    """

    name: str
    structure: str
    hamiltonian: str
    scheme: str
    dt: float
    steps: int
    initial: tuple
    matrix: tuple = None
    outputs: tuple = ("trajectory",)
    seed: int = 0
    order: int = None
    newton_tol: float = 1e-12
    newton_max_iter: int = 50
    allow_substep: bool = False
    split_parts: tuple = None
    order_dts: tuple = None
    order_reference: str = None
    order_horizon: float = 1.0


@dataclass
class TrajectoryRecord:
    """States and per-step diagnostics of one run.

    ``times[i]`` equals ``i * dt`` exactly (same float product, not an
    accumulated sum).  ``newton_iters`` is zero on row 0 and for every
    explicit scheme.  Rows where an observable left its domain or
    overflowed hold nan.
    """

    config: object
    coords: tuple
    states: np.ndarray
    times: np.ndarray
    h_values: np.ndarray
    casimirs: np.ndarray
    newton_iters: np.ndarray


@dataclass
class DriftReport:
    """Worst-case invariant drift over a trajectory.

    Non-finite observable values count as infinite drift; a trajectory
    that leaves the domain of an invariant has not conserved it.
    """

    h_drift: float
    casimir_drifts: tuple
    newton_histogram: dict
    steps: int


@dataclass
class OrderStudyResult:
    """(dt, error) table plus the least-squares slope on log-log axes."""

    rows: tuple
    slope: float
    reference: str
    horizon: float


# ---------------------------------------------------------------------------
# config loading


def _want(value, kind, where):
    if kind is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        value = float(value) if ok else value
    elif kind is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, kind)
    if not ok:
        raise ConfigError(f"{where}: expected {kind.__name__}, got {value!r}")
    return value


_REQUIRED = object()


def _take(section, key, kind, where, default=_REQUIRED):
    if key not in section:
        if default is _REQUIRED:
            raise ConfigError(f"{where}.{key} is required")
        return default
    return _want(section.pop(key), kind, f"{where}.{key}")


def _reject_leftovers(section, where):
    if section:
        extra = ", ".join(sorted(section))
        raise ConfigError(f"unknown key(s) in [{where}]: {extra}")


def config_from_mapping(data, name):
    """RunConfig from a parsed TOML mapping; raises ConfigError."""
    data = dict(data)
    if "run" not in data:
        raise ConfigError("missing [run] section")
    runsec = dict(data.pop("run"))
    structsec = dict(data.pop("structure", {}))
    newtonsec = dict(data.pop("newton", {}))
    splitsec = dict(data.pop("split", {}))
    ordersec = dict(data.pop("order_study", {}))
    if data:
        extra = ", ".join(sorted(data))
        raise ConfigError(f"unknown section(s): {extra}")

    initial = _take(runsec, "initial", list, "run")
    outputs = _take(runsec, "outputs", list, "run", default=["trajectory"])
    cfg = RunConfig(
        name=name,
        structure=_take(runsec, "structure", str, "run"),
        hamiltonian=_take(runsec, "hamiltonian", str, "run"),
        scheme=_take(runsec, "scheme", str, "run"),
        dt=_take(runsec, "dt", float, "run"),
        steps=_take(runsec, "steps", int, "run"),
        initial=tuple(_want(v, float, "run.initial[]") for v in initial),
        outputs=tuple(_want(v, str, "run.outputs[]") for v in outputs),
        seed=_take(runsec, "seed", int, "run", default=0),
        order=_take(runsec, "order", int, "run", default=None),
    )
    _reject_leftovers(runsec, "run")

    matrix = _take(structsec, "matrix", list, "structure", default=None)
    if matrix is not None:
        cfg.matrix = tuple(
            tuple(_want(v, float, "structure.matrix[]") for v in row) for row in matrix
        )
    _reject_leftovers(structsec, "structure")

    cfg.newton_tol = _take(newtonsec, "tol", float, "newton", default=1e-12)
    cfg.newton_max_iter = _take(newtonsec, "max_iter", int, "newton", default=50)
    cfg.allow_substep = _take(newtonsec, "substep", bool, "newton", default=False)
    _reject_leftovers(newtonsec, "newton")

    parts = _take(splitsec, "parts", list, "split", default=None)
    if parts is not None:
        cfg.split_parts = tuple(_want(v, str, "split.parts[]") for v in parts)
    _reject_leftovers(splitsec, "split")

    dts = _take(ordersec, "dts", list, "order_study", default=None)
    if dts is not None:
        cfg.order_dts = tuple(_want(v, float, "order_study.dts[]") for v in dts)
    cfg.order_reference = _take(ordersec, "reference", str, "order_study", default=None)
    cfg.order_horizon = _take(ordersec, "horizon", float, "order_study", default=1.0)
    _reject_leftovers(ordersec, "order_study")

    validate_config(cfg)
    return cfg


def load_config(path):
    """Parse and validate a TOML run config; raises ConfigError."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path!r}: {exc}") from None
    name = os.path.splitext(os.path.basename(path))[0]
    return config_from_mapping(data, name)


def _parse_scheme(text):
    """(kind, param) from a scheme id; raises ConfigError on unknown ids."""
    if text == "rk4":
        return "rk4", None
    if text == "kahan_lv":
        return "kahan_lv", None
    if text.startswith("hj:") or text.startswith("counterexample:"):
        kind, _, tail = text.partition(":")
        try:
            k = int(tail)
        except ValueError:
            raise ConfigError(f"scheme {text!r}: order must be an integer") from None
        if k < 1:
            raise ConfigError(f"scheme {text!r}: order must be >= 1")
        return kind, k
    if text.startswith("strang:"):
        tail = text.partition(":")[2]
        pieces = tail.split(",")
        if len(pieces) != 2:
            raise ConfigError(f"scheme {text!r}: expected strang:<a>,<b>")
        try:
            a, b = float(pieces[0]), float(pieces[1])
        except ValueError:
            raise ConfigError(f"scheme {text!r}: weights must be numbers") from None
        return "strang", (a, b)
    raise ConfigError(f"unknown scheme id {text!r}")


_IMPLIED_ORDER = {"rk4": 4, "kahan_lv": 2, "strang": 2}


def validate_config(cfg):
    """Check every invariant a RunConfig promises; raises ConfigError."""
    if cfg.steps < 1:
        raise ConfigError(f"steps must be >= 1, got {cfg.steps}")
    if not (math.isfinite(cfg.dt) and cfg.dt > 0.0):
        raise ConfigError(f"dt must be positive and finite, got {cfg.dt}")
    if not all(math.isfinite(v) for v in cfg.initial):
        raise ConfigError("initial state must be finite")
    if not cfg.outputs:
        raise ConfigError("outputs must name at least one artifact")
    for out in cfg.outputs:
        if out not in _OUTPUT_KINDS:
            raise ConfigError(
                f"unknown output {out!r}; known: {', '.join(_OUTPUT_KINDS)}"
            )
    if cfg.seed < 0:
        raise ConfigError(f"seed must be >= 0, got {cfg.seed}")
    if cfg.newton_max_iter < 1:
        raise ConfigError("newton.max_iter must be >= 1")
    if not (math.isfinite(cfg.newton_tol) and cfg.newton_tol > 0.0):
        raise ConfigError("newton.tol must be positive")

    struct, _ = _structure_and_h(cfg)
    kind, param = _parse_scheme(cfg.scheme)

    if len(cfg.initial) != struct.dim:
        raise ConfigError(
            f"initial state has {len(cfg.initial)} components, "
            f"structure {cfg.structure!r} has dimension {struct.dim}"
        )

    if kind in ("hj", "strang"):
        try:
            bireal_for(struct)
        except UsageError as exc:
            raise ConfigError(str(exc)) from None
    if kind == "kahan_lv" and struct.matrix is None:
        raise ConfigError("scheme kahan_lv needs the log_canonical structure")
    if kind == "counterexample" and struct.dim != 2:
        raise ConfigError("scheme counterexample:<k> needs a 2d structure")
    if kind == "strang":
        if cfg.split_parts is None or len(cfg.split_parts) != 2:
            raise ConfigError("scheme strang:<a>,<b> needs [split] parts = [h1, h2]")
        for text in cfg.split_parts:
            try:
                struct.parse_hamiltonian(text)
            except ParseError as exc:
                raise ConfigError(f"split part {text!r}: {exc}") from None

    implied = _IMPLIED_ORDER.get(kind, param)
    if cfg.order is not None and cfg.order != implied:
        raise ConfigError(
            f"order {cfg.order} contradicts scheme {cfg.scheme!r} (order {implied})"
        )

    if "order-study" in cfg.outputs:
        _check_order_fields(cfg)
    return cfg


def _check_order_fields(cfg):
    if not cfg.order_dts:
        raise ConfigError("order study needs [order_study] dts")
    if cfg.order_reference is None:
        raise ConfigError("order study needs [order_study] reference")
    _check_reference(cfg.order_reference)
    horizon = cfg.order_horizon
    if not (math.isfinite(horizon) and horizon > 0.0):
        raise ConfigError(f"order_study.horizon must be positive, got {horizon}")
    for dt in cfg.order_dts:
        if not (math.isfinite(dt) and dt > 0.0):
            raise ConfigError(f"order_study.dts entries must be positive, got {dt}")
        n = round(horizon / dt)
        if n < 1 or abs(n * dt - horizon) > 1e-9 * horizon:
            raise ConfigError(
                f"dt {dt} does not divide the study horizon {horizon}"
            )


def _check_reference(text):
    if text == "rk4":
        return
    if text.startswith("exact:") and text.partition(":")[2] in _EXACT_TAGS:
        return
    raise ConfigError(
        f"unknown reference {text!r}; use rk4 or exact:<tag> with tag in "
        + ", ".join(_EXACT_TAGS)
    )


def _structure_and_h(cfg):
    try:
        struct = from_id(cfg.structure, matrix=cfg.matrix)
    except (UsageError, ValueError) as exc:
        raise ConfigError(f"structure {cfg.structure!r}: {exc}") from None
    try:
        h = struct.parse_hamiltonian(cfg.hamiltonian)
    except ParseError as exc:
        raise ConfigError(f"hamiltonian {cfg.hamiltonian!r}: {exc}") from None
    return struct, h


def prepare(cfg):
    """(structure, hamiltonian Expr, stepper) for a validated config.

    The stepper maps (x, dt) to (next state, newton iteration count);
    explicit schemes report zero iterations.
    """
    struct, h = _structure_and_h(cfg)
    kind, param = _parse_scheme(cfg.scheme)

    if kind == "hj":
        gf = hj_coefficients(h, bireal_for(struct), param)

        def stepper(x, dt):
            sc = StepConfig(dt, cfg.newton_tol, cfg.newton_max_iter, cfg.allow_substep)
            out, report = hj_step(gf, sc, x)
            return out, report.iterations

    elif kind == "rk4":

        def stepper(x, dt):
            return rk4_step(struct, h, dt, x), 0

    elif kind == "kahan_lv":
        a = np.asarray(struct.matrix, dtype=float)

        def stepper(x, dt):
            return kahan_lv_step(a, dt, x), 0

    elif kind == "counterexample":

        def stepper(x, dt):
            return counterexample_step(param, dt, x), 0

    else:
        bireal = bireal_for(struct)
        maps = [
            make_hj_step(
                hj_coefficients(struct.parse_hamiltonian(text), bireal, 1),
                cfg.newton_tol,
                cfg.newton_max_iter,
                cfg.allow_substep,
            )
            for text in cfg.split_parts
        ]
        composite = strang(maps[0], maps[1], param[0], param[1])

        def stepper(x, dt):
            return composite(x, dt), 0

    return struct, h, stepper


# ---------------------------------------------------------------------------
# running


def _safe_eval(expr, x):
    try:
        v = float(evaluate(expr, tuple(float(c) for c in x)))
    except (DomainError, OverflowError, ZeroDivisionError, ValueError):
        return float("nan")
    return v


def run(config):
    """Integrate the configured trajectory; returns a TrajectoryRecord.

    Fails fast: a Newton breakdown inside an implicit step aborts the run
    with NumericalFailure carrying the 1-based index of the failed step.
    """
    validate_config(config)
    struct, h, stepper = prepare(config)
    n = struct.dim
    m = len(struct.casimirs)
    steps = config.steps
    dt = config.dt

    states = np.empty((steps + 1, n))
    h_values = np.empty(steps + 1)
    casimirs = np.empty((steps + 1, m))
    newton_iters = np.zeros(steps + 1, dtype=int)

    x = np.asarray(config.initial, dtype=float)
    states[0] = x
    h_values[0] = _safe_eval(h, x)
    casimirs[0] = [_safe_eval(c, x) for c in struct.casimirs]

    for i in range(1, steps + 1):
        try:
            x, iters = stepper(x, dt)
        except NewtonDiverged as exc:
            raise NumericalFailure(
                f"scheme {config.scheme!r} did not converge: {exc}", step_index=i
            ) from exc
        states[i] = x
        h_values[i] = _safe_eval(h, x)
        casimirs[i] = [_safe_eval(c, x) for c in struct.casimirs]
        newton_iters[i] = iters

    times = np.arange(steps + 1, dtype=float) * dt
    return TrajectoryRecord(
        config=config,
        coords=struct.coords,
        states=states,
        times=times,
        h_values=h_values,
        casimirs=casimirs,
        newton_iters=newton_iters,
    )


def drift_report(record):
    """Worst observed drift of H and each Casimir, plus a Newton histogram.

    The histogram counts steps 1..N by iteration count; explicit schemes
    produce a single bucket at zero.
    """
    h_drift = _max_drift(record.h_values)
    casimir_drifts = tuple(
        _max_drift(record.casimirs[:, j]) for j in range(record.casimirs.shape[1])
    )
    hist = {}
    for v in record.newton_iters[1:]:
        hist[int(v)] = hist.get(int(v), 0) + 1
    hist = {k: hist[k] for k in sorted(hist)}
    return DriftReport(h_drift, casimir_drifts, hist, len(record.newton_iters) - 1)


def _max_drift(values):
    deltas = np.abs(values - values[0])
    if not np.all(np.isfinite(deltas)):
        return float("inf")
    return float(np.max(deltas))


def order_study(config, dts=None, reference=None, horizon=None):
    """Global error at a fixed horizon under dt refinement.

    The config's own dt and step count are ignored; each study dt must
    divide the horizon evenly.  Reference states come from exact:<tag>
    closed-form flows or from RK4 on the same field at dt/100.
    """
    dts = tuple(dts) if dts is not None else config.order_dts
    reference = reference if reference is not None else config.order_reference
    horizon = horizon if horizon is not None else config.order_horizon
    validate_config(config)
    probe = replace(
        config, order_dts=dts, order_reference=reference, order_horizon=horizon
    )
    _check_order_fields(probe)

    struct, h, stepper = prepare(config)
    x0 = np.asarray(config.initial, dtype=float)

    rows = []
    for dt in dts:
        nsteps = round(horizon / dt)
        x = x0.copy()
        for i in range(1, nsteps + 1):
            try:
                x, _ = stepper(x, dt)
            except NewtonDiverged as exc:
                raise NumericalFailure(
                    f"order study at dt={dt} did not converge: {exc}", step_index=i
                ) from exc
        ref = _reference_state(reference, struct, h, config, x0, horizon, dt)
        rows.append((float(dt), float(np.linalg.norm(x - ref))))

    logs = np.log([r[0] for r in rows]), np.log([r[1] for r in rows])
    slope = float(np.polyfit(logs[0], logs[1], 1)[0])
    return OrderStudyResult(tuple(rows), slope, reference, float(horizon))


def _reference_state(reference, struct, h, config, x0, horizon, dt):
    if reference == "rk4":
        fine = dt / 100.0
        x = x0.copy()
        for _ in range(round(horizon / dt) * 100):
            x = rk4_step(struct, h, fine, x)
        return x
    tag = reference.partition(":")[2]
    kwargs = {}
    if config.matrix is not None:
        kwargs["matrix"] = np.asarray(config.matrix, dtype=float)
    return exact_flow(tag, horizon, x0, **kwargs)


# ---------------------------------------------------------------------------
# artifacts


def _fmt(v):
    return "%.17g" % v


def trajectory_csv_text(record):
    """The fixed-schema CSV body for a trajectory record."""
    n = record.states.shape[1]
    m = record.casimirs.shape[1]
    header = (
        ["step", "time"]
        + [f"x{i}" for i in range(n)]
        + ["H"]
        + [f"C{j}" for j in range(m)]
        + ["newton_iters"]
    )
    lines = [",".join(header)]
    for i in range(record.states.shape[0]):
        cells = [str(i), _fmt(record.times[i])]
        cells += [_fmt(v) for v in record.states[i]]
        cells.append(_fmt(record.h_values[i]))
        cells += [_fmt(v) for v in record.casimirs[i]]
        cells.append(str(int(record.newton_iters[i])))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _config_echo(cfg):
    echo = {}
    for key, value in cfg.__dict__.items():
        if isinstance(value, tuple):
            value = [list(v) if isinstance(v, tuple) else v for v in value]
        echo[key] = value
    return echo


def _write_artifact(directory, name, csv_text, meta):
    os.makedirs(directory, exist_ok=True)
    csv_path = os.path.join(directory, name + ".csv")
    meta_path = os.path.join(directory, name + ".json")
    data = csv_text.encode("ascii")
    meta = dict(meta)
    meta["content_hash"] = "sha256:" + hashlib.sha256(data).hexdigest()
    with open(csv_path, "wb") as fh:
        fh.write(data)
    with open(meta_path, "w", encoding="ascii") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, meta_path


def write_trajectory(record, directory, name=None):
    """Write <name>.csv and <name>.json; returns both paths.

    The JSON sidecar echoes the full config and carries a sha256 of the
    CSV bytes, so artifacts are self-describing and tamper-evident.
    """
    cfg = record.config
    name = name if name is not None else cfg.name
    meta = {
        "command": "run",
        "config": _config_echo(cfg),
        "coords": list(record.coords),
        "rows": int(record.states.shape[0]),
    }
    return _write_artifact(directory, name, trajectory_csv_text(record), meta)


def write_order_study(result, config, directory, name=None):
    """Write the (dt, error) table plus slope metadata; returns both paths."""
    name = name if name is not None else config.name + "_order"
    lines = ["dt,error"]
    for dt, err in result.rows:
        lines.append(",".join([_fmt(dt), _fmt(err)]))
    meta = {
        "command": "order-study",
        "config": _config_echo(config),
        "slope": result.slope,
        "reference": result.reference,
        "horizon": result.horizon,
    }
    return _write_artifact(directory, name, "\n".join(lines) + "\n", meta)


def record_from_csv(path):
    """Re-read a trajectory CSV into a TrajectoryRecord (config=None).

    Accepts exactly the schema written by write_trajectory; anything else
    raises ConfigError.
    """
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = [ln for ln in fh.read().splitlines() if ln]
    except OSError as exc:
        raise ConfigError(f"cannot read trajectory {path!r}: {exc}") from None
    if not lines:
        raise ConfigError(f"empty trajectory file {path!r}")
    header = lines[0].split(",")
    if (
        len(header) < 4
        or header[:2] != ["step", "time"]
        or header[-1] != "newton_iters"
        or "H" not in header
    ):
        raise ConfigError(f"unrecognized trajectory header in {path!r}")
    h_col = header.index("H")
    n = h_col - 2
    m = len(header) - h_col - 2
    if header[2:h_col] != [f"x{i}" for i in range(n)] or header[
        h_col + 1 : -1
    ] != [f"C{j}" for j in range(m)]:
        raise ConfigError(f"unrecognized trajectory header in {path!r}")

    rows = len(lines) - 1
    states = np.empty((rows, n))
    times = np.empty(rows)
    h_values = np.empty(rows)
    casimirs = np.empty((rows, m))
    newton_iters = np.zeros(rows, dtype=int)
    for i, line in enumerate(lines[1:]):
        cells = line.split(",")
        if len(cells) != len(header):
            raise ConfigError(f"row {i} of {path!r} has {len(cells)} cells")
        try:
            times[i] = float(cells[1])
            states[i] = [float(c) for c in cells[2:h_col]]
            h_values[i] = float(cells[h_col])
            casimirs[i] = [float(c) for c in cells[h_col + 1 : -1]]
            newton_iters[i] = int(cells[-1])
        except ValueError as exc:
            raise ConfigError(f"row {i} of {path!r}: {exc}") from None
    return TrajectoryRecord(
        config=None,
        coords=tuple(f"x{i}" for i in range(n)),
        states=states,
        times=times,
        h_values=h_values,
        casimirs=casimirs,
        newton_iters=newton_iters,
    )


# ---------------------------------------------------------------------------
# fixtures


@dataclass
class FixtureResult:
    name: str
    passed: bool
    detail: str


def _fixture_points(data, dim):
    rng = np.random.default_rng(int(data.get("seed", 0)))
    count = int(data.get("count", 20))
    return [rng.uniform(0.5, 1.5, size=dim) for _ in range(count)]


def _check_midpoint_equivalence(data):
    struct = from_id(data["structure"])
    h = struct.parse_hamiltonian(data["hamiltonian"])
    gf = hj_coefficients(h, bireal_for(struct), 1)
    dt = float(data["dt"])
    tol = float(data["tol"])

    def field(x):
        lifted = dual_lift(tuple(x))
        hv = evaluate(h, lifted)
        pi = struct.tensor(tuple(x))
        n = struct.dim
        out = np.zeros(n)
        for i in range(n):
            for j in range(n):
                out[i] += real_part(pi[i][j]) * real_part(hv.g[j])
        return out

    worst = 0.0
    for x in _fixture_points(data, struct.dim):
        out, _ = hj_step(gf, StepConfig(dt, newton_tol=1e-14), x)
        z = x.copy()
        for _ in range(500):
            znew = x + dt * field(0.5 * (x + z))
            if np.max(np.abs(znew - z)) < 1e-15:
                z = znew
                break
            z = znew
        worst = max(worst, float(np.max(np.abs(out - z))))
    return worst < tol, f"max |hj:1 - midpoint| = {worst:.3e} (tol {tol:g})"


def _check_s2_log_canonical(data):
    matrix = tuple(tuple(float(v) for v in row) for row in data["matrix"])
    struct = from_id("log_canonical", matrix=matrix)
    gf_cache = {}
    tol = float(data["tol"])
    worst = 0.0
    for text in data["hamiltonians"]:
        h = struct.parse_hamiltonian(text)
        if text not in gf_cache:
            gf_cache[text] = hj_coefficients(h, bireal_for(struct), 2)
        gf = gf_cache[text]
        for x in _fixture_points(data, struct.dim):
            s2 = float(gf.S[1](tuple(x)))
            hv = evaluate(h, dual_lift(tuple(x)))
            grads = [real_part(g) for g in hv.g]
            formula = 0.0
            for i in range(struct.dim):
                for j in range(struct.dim):
                    formula += matrix[i][j] * x[i] * x[j] * grads[i] * grads[j]
            formula *= -0.5
            worst = max(worst, abs(s2 - formula))
    return worst < tol, f"max |S_2 - closed form| = {worst:.3e} (tol {tol:g})"


def _check_kahan_h_exact(data):
    cfg = RunConfig(
        name="kahan_fixture",
        structure="log_canonical",
        hamiltonian=data["hamiltonian"],
        scheme="kahan_lv",
        dt=float(data["dt"]),
        steps=int(data["steps"]),
        initial=tuple(float(v) for v in data["initial"]),
        matrix=tuple(tuple(float(v) for v in row) for row in data["matrix"]),
        outputs=("drift",),
    )
    report = drift_report(run(cfg))
    tol = float(data["tol"])
    return (
        report.h_drift < tol,
        f"max |H - H_0| = {report.h_drift:.3e} over {report.steps} steps (tol {tol:g})",
    )


def _check_counterexample_divergence(data):
    k = int(data["k"])
    dt = float(data["dt"])
    x0 = np.asarray([float(v) for v in data["initial"]], dtype=float)
    slope_tol = float(data["slope_tol"])
    factor = float(data["factor"])
    nsteps = math.ceil(math.log(factor + 1.0) / dt**k)

    x = x0.copy()
    lognorm = math.log(float(np.linalg.norm(x)))
    worst_inc = 0.0
    for _ in range(nsteps):
        x = counterexample_step(k, dt, x)
        nxt = math.log(float(np.linalg.norm(x)))
        worst_inc = max(worst_inc, abs((nxt - lognorm) - dt**k))
        lognorm = nxt
    exact = exact_flow("counterexample_2d", nsteps * dt, x0)
    dist = float(np.linalg.norm(x - exact))
    bound = factor * float(np.linalg.norm(x0))
    ok = worst_inc < slope_tol and dist > bound
    return (
        ok,
        f"log-norm increment deviates {worst_inc:.3e} from dt^k, "
        f"distance {dist:.3e} vs required {bound:.3e} after {nsteps} steps",
    )


def _check_magnus_euler_symplectic(data):
    struct = from_id("canonical:2")
    v_expr = struct.parse_hamiltonian(data["potential"])
    k_expr = struct.parse_hamiltonian(data["kinetic"])
    expected = struct.parse_hamiltonian(data["expected_omega2"])
    tol = float(data["tol"])
    kp_expr = diff(k_expr, 1)

    def h(t, point):
        q, p = point
        kp = evaluate(kp_expr, (q, p))
        return evaluate(k_expr, (q, p)) + evaluate(v_expr, (q + t * kp, p))

    ht = TimeDepHamiltonian.from_time_function(h, order=2)
    series = magnus_truncate(ht, struct, 2)
    worst = 0.0
    for x in _fixture_points(data, 2):
        got = float(series.coeffs[1](tuple(x)))
        want = float(evaluate(expected, tuple(x)))
        worst = max(worst, abs(got - want))
    return worst < tol, f"max |Omega_2 - expected| = {worst:.3e} (tol {tol:g})"


_FIXTURE_KINDS = {
    "midpoint_equivalence": _check_midpoint_equivalence,
    "s2_log_canonical": _check_s2_log_canonical,
    "kahan_h_exact": _check_kahan_h_exact,
    "counterexample_divergence": _check_counterexample_divergence,
    "magnus_euler_symplectic": _check_magnus_euler_symplectic,
}


def run_fixture(path):
    """Run one fixture TOML; never raises on mismatch, only on bad files."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read fixture {path!r}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path!r}: {exc}") from None
    if "fixture" not in data:
        raise ConfigError(f"{path!r}: missing [fixture] section")
    body = dict(data["fixture"])
    kind = body.pop("kind", None)
    if kind not in _FIXTURE_KINDS:
        raise ConfigError(f"{path!r}: unknown fixture kind {kind!r}")
    name = os.path.splitext(os.path.basename(path))[0]
    passed, detail = _FIXTURE_KINDS[kind](body)
    return FixtureResult(name, bool(passed), detail)


def run_fixtures(directory):
    """Run every *.toml fixture under ``directory``, sorted by filename."""
    try:
        names = sorted(os.listdir(directory))
    except OSError as exc:
        raise ConfigError(f"cannot list fixtures in {directory!r}: {exc}") from None
    paths = [os.path.join(directory, n) for n in names if n.endswith(".toml")]
    if not paths:
        raise ConfigError(f"no fixture files in {directory!r}")
    return [run_fixture(p) for p in paths]
