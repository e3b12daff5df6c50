"""Batch runner: parse a run configuration, execute scenarios, emit CSVs.

Config documents are JSON.  Keys (all optional unless a mode requires
them):

    mode          evolve | steady | threshold | oracle-compare | figures
    g_values      list of pump ratios (required except for figures)
    delta_values  list of threshold fractions (threshold mode)
    tau_end       integration span (defaults: evolve/threshold 20,
                  oracle-compare 5; figures uses per-figure spans)
    dtau          step size, default 1e-3
    sample_every  output decimation, default 10
    fock_dim      initial oracle truncation, default 64
    initial_state [u, phi, n_th], default vacuum (evolve mode)
    output_dir    where CSVs and manifest.json go, default "out"

Outputs are deterministic: identical configs give byte-identical files.
"""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .core_model import StsState, PumpConfig, uncertainty_product
from .errors import ConfigError, DatasetInvariantError, SqueezecavError
from .fock_oracle import compare_trajectories
from .steady_state import find_threshold, g2_ss, quad_limits, steady_state, svs_g2
from .sts_dynamics import IntegrationControl, integrate

MODES = ("evolve", "steady", "threshold", "oracle-compare", "figures")

_KNOWN_KEYS = {
    "mode", "g_values", "delta_values", "tau_end", "dtau", "sample_every",
    "fock_dim", "initial_state", "output_dir",
}

_DEFAULT_TAU_END = {"evolve": 20.0, "threshold": 20.0, "oracle-compare": 5.0}

# Figure recipe constants (tau spans chosen to show saturation for g < 1
# and the early-time behaviour for strong pumping).
_FIG12_G = (0.8, 1.0, 1.2)
_FIG3_G = (0.4, 0.6, 0.8)
_FIG5A_G = (5.0, 10.0, 50.0, 100.0)
_FIG56_DELTAS = (0.1, 0.2)
_FIG56_G = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0)
_FIG12_TAU = 20.0
_FIG5A_TAU = 4.0
_THRESHOLD_TAU = 5.0


@dataclass(frozen=True)
class RunConfig:
    mode: str
    g_values: tuple = ()
    delta_values: tuple = ()
    tau_end: float | None = None
    dtau: float = 1e-3
    sample_every: int = 10
    fock_dim: int = 64
    initial_state: tuple | None = None
    output_dir: str = "out"

    def resolved_tau_end(self):
        if self.tau_end is not None:
            return self.tau_end
        return _DEFAULT_TAU_END.get(self.mode)

    def control(self, sample_every=None):
        return IntegrationControl(
            tau_end=self.resolved_tau_end(),
            dtau=self.dtau,
            sample_every=sample_every if sample_every is not None else self.sample_every,
        )


def _fail(msg, key):
    raise ConfigError(f"config key '{key}': {msg}", key=key)


def _number(raw, key, minimum=None, strict=False):
    if isinstance(raw, bool) or not isinstance(raw, (int, float)) or not math.isfinite(raw):
        _fail(f"expected a finite number, got {raw!r}", key)
    if minimum is not None and (raw <= minimum if strict else raw < minimum):
        _fail(f"value {raw!r} out of range", key)
    return float(raw)


def _integer(raw, key, minimum):
    if isinstance(raw, bool) or not isinstance(raw, int):
        _fail(f"expected an integer, got {raw!r}", key)
    if raw < minimum:
        _fail(f"value {raw} must be >= {minimum}", key)
    return raw


def _number_list(raw, key, minimum=None, strict=False):
    if not isinstance(raw, list) or not raw:
        _fail(f"expected a non-empty list, got {raw!r}", key)
    return tuple(_number(v, key, minimum, strict) for v in raw)


def config_from_dict(raw):
    """Validate a decoded config dict into a RunConfig."""
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a JSON object")
    unknown = sorted(set(raw) - _KNOWN_KEYS)
    if unknown:
        _fail("unknown key", unknown[0])
    if "mode" not in raw:
        _fail("missing (one of %s)" % ", ".join(MODES), "mode")
    mode = raw["mode"]
    if mode not in MODES:
        _fail(f"must be one of {', '.join(MODES)}, got {mode!r}", "mode")

    kwargs = {"mode": mode}
    if mode != "figures":
        if "g_values" not in raw:
            _fail(f"required for mode {mode!r}", "g_values")
        kwargs["g_values"] = _number_list(raw["g_values"], "g_values", minimum=0.0)
    elif "g_values" in raw:
        kwargs["g_values"] = _number_list(raw["g_values"], "g_values", minimum=0.0)
    if mode == "threshold":
        if "delta_values" not in raw:
            _fail("required for mode 'threshold'", "delta_values")
        kwargs["delta_values"] = _number_list(
            raw["delta_values"], "delta_values", minimum=0.0, strict=True
        )
    elif "delta_values" in raw:
        kwargs["delta_values"] = _number_list(
            raw["delta_values"], "delta_values", minimum=0.0, strict=True
        )
    if "tau_end" in raw:
        kwargs["tau_end"] = _number(raw["tau_end"], "tau_end", minimum=0.0, strict=True)
    if "dtau" in raw:
        kwargs["dtau"] = _number(raw["dtau"], "dtau", minimum=0.0, strict=True)
    if "sample_every" in raw:
        kwargs["sample_every"] = _integer(raw["sample_every"], "sample_every", 1)
    if "fock_dim" in raw:
        kwargs["fock_dim"] = _integer(raw["fock_dim"], "fock_dim", 2)
    if "initial_state" in raw:
        triple = raw["initial_state"]
        if not isinstance(triple, list) or len(triple) != 3:
            _fail("expected [u, phi, n_th]", "initial_state")
        u = _number(triple[0], "initial_state", minimum=0.0)
        phi = _number(triple[1], "initial_state")
        n_th = _number(triple[2], "initial_state", minimum=0.0)
        kwargs["initial_state"] = (u, phi, n_th)
    if "output_dir" in raw:
        if not isinstance(raw["output_dir"], str) or not raw["output_dir"]:
            _fail("expected a non-empty string", "output_dir")
        kwargs["output_dir"] = raw["output_dir"]
    return RunConfig(**kwargs)


def parse_config(text):
    """Parse a JSON config document into a validated RunConfig."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}") from err
    return config_from_dict(raw)


@dataclass(frozen=True)
class FigureDataset:
    """Named set of equal-length numeric columns."""

    name: str
    columns: dict

    def validate(self):
        if not self.columns:
            raise DatasetInvariantError(f"dataset {self.name}: no columns")
        length = None
        for col, values in self.columns.items():
            n = len(values)
            if n == 0:
                raise DatasetInvariantError(f"dataset {self.name}: column {col} is empty")
            if length is None:
                length = n
            elif n != length:
                raise DatasetInvariantError(
                    f"dataset {self.name}: column {col} has {n} rows, expected {length}"
                )


def _fmt(value):
    if value is None:
        return "nan"
    return format(float(value), ".17g")


def emit_csv(dataset, output_dir):
    """Write one dataset as <name>.csv under output_dir; returns the path."""
    from pathlib import Path

    dataset.validate()
    out = Path(output_dir)
    path = out / f"{dataset.name}.csv"
    names = list(dataset.columns)
    cols = [dataset.columns[c] for c in names]
    lines = [",".join(names)]
    for row in zip(*cols):
        lines.append(",".join(_fmt(v) for v in row))
    try:
        out.mkdir(parents=True, exist_ok=True)
        path.write_bytes(("\n".join(lines) + "\n").encode("utf-8"))
    except OSError as err:
        raise OSError(f"writing {path}: {err}") from err
    return path


@dataclass
class ScenarioReport:
    datasets: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    files: list = field(default_factory=list)
    failures: list = field(default_factory=list)


def _initial(config):
    if config.initial_state is None:
        return StsState.vacuum()
    u, phi, n_th = config.initial_state
    return StsState(u=u, phi=phi, n_th=n_th)


def _g_label(g):
    return format(g, "g")


def _evolve_columns(traj):
    return {
        "tau": traj.tau_grid,
        "u": traj.u,
        "n_th": traj.n_th,
        "dx": traj.dx,
        "dy": traj.dy,
        "dxdy": traj.product,
        "n_mean": traj.n_mean,
        "n_svs": traj.n_svs,
        "g2": traj.g2,
    }


def _run_evolve(config, report):
    ctrl = config.control()
    initial = _initial(config)
    checks = {}
    for g in config.g_values:
        unit = f"evolve g={_g_label(g)}"
        try:
            traj = integrate(initial, PumpConfig(g=g), ctrl)
        except SqueezecavError as err:
            report.failures.append(_failure(unit, err))
            continue
        report.datasets.append(
            FigureDataset(name=f"evolve_g{_g_label(g)}", columns=_evolve_columns(traj))
        )
        checks[unit] = {
            "positivity": bool(traj.u.min() >= 0.0 and traj.n_th.min() >= 0.0),
            "uncertainty_floor": bool(traj.product.min() >= 1.0 - 1e-12),
        }
    report.summary["invariant_checks"] = checks


def _run_steady(config, report):
    rows = {k: [] for k in (
        "g", "u_ss", "n_th_ss", "n_mean_ss", "dx_ss", "dy_ss", "product_ss", "g2_ss"
    )}
    worst = 0.0
    for g in sorted(config.g_values):
        unit = f"steady g={_g_label(g)}"
        try:
            ss = steady_state(g)
        except SqueezecavError as err:
            report.failures.append(_failure(unit, err))
            continue
        rows["g"].append(g)
        rows["u_ss"].append(ss.u_ss)
        rows["n_th_ss"].append(ss.n_th_ss)
        rows["n_mean_ss"].append(ss.n_mean_ss)
        rows["dx_ss"].append(ss.dx_ss)
        rows["dy_ss"].append(ss.dy_ss)
        rows["product_ss"].append(ss.product_ss)
        rows["g2_ss"].append(math.nan if ss.g2_ss is None else ss.g2_ss)
        worst = max(worst, abs(math.sinh(ss.u_ss) ** 2 - ss.n_th_ss))
    if rows["g"]:
        report.datasets.append(FigureDataset(name="steady", columns=rows))
    report.summary["invariant_checks"] = {"max_fixed_point_residual": worst}


def _run_threshold(config, report):
    rows = {k: [] for k in ("g", "delta", "tau_star", "dx", "product", "g2")}
    ctrl = config.control()
    worst = 0.0
    for g in sorted(config.g_values):
        for delta in sorted(config.delta_values):
            unit = f"threshold g={_g_label(g)} delta={_g_label(delta)}"
            try:
                res = find_threshold(g, delta, ctrl)
            except SqueezecavError as err:
                report.failures.append(_failure(unit, err))
                continue
            obs = res.observables_at_threshold
            rows["g"].append(g)
            rows["delta"].append(delta)
            rows["tau_star"].append(res.tau_star)
            rows["dx"].append(obs.dx)
            rows["product"].append(uncertainty_product(res.state_at_threshold))
            rows["g2"].append(math.nan if obs.g2 is None else obs.g2)
            worst = max(worst, abs(obs.dx - (1.0 + delta) / math.sqrt(1.0 + g)))
    if rows["g"]:
        report.datasets.append(FigureDataset(name="threshold", columns=rows))
    report.summary["invariant_checks"] = {"max_root_residual": worst}


def _run_oracle_compare(config, report):
    rows = {k: [] for k in (
        "g", "dx_dev", "dy_dev", "n_mean_dev", "g2_dev", "trace_distance_max",
        "tau_compared",
    )}
    ctrl = config.control()
    notes = {}
    for g in sorted(config.g_values):
        unit = f"oracle-compare g={_g_label(g)}"
        try:
            traj = integrate(StsState.vacuum(), PumpConfig(g=g), ctrl)
            rep = compare_trajectories(traj, g, ctrl, fock_dim=config.fock_dim)
        except SqueezecavError as err:
            report.failures.append(_failure(unit, err))
            continue
        rows["g"].append(g)
        rows["dx_dev"].append(rep.dx_dev)
        rows["dy_dev"].append(rep.dy_dev)
        rows["n_mean_dev"].append(rep.n_mean_dev)
        rows["g2_dev"].append(math.nan if rep.g2_dev is None else rep.g2_dev)
        rows["trace_distance_max"].append(rep.trace_distance_max)
        rows["tau_compared"].append(rep.tau_compared)
        if rep.truncation_note:
            notes[unit] = rep.truncation_note
    if rows["g"]:
        report.datasets.append(FigureDataset(name="oracle_compare", columns=rows))
    report.summary["invariant_checks"] = {"truncation_notes": notes}


def _run_figures(config, report):
    dtau, every = config.dtau, config.sample_every

    def ctrl(tau_end):
        return IntegrationControl(tau_end=tau_end, dtau=dtau, sample_every=every)

    vac = StsState.vacuum()
    trajs = {g: integrate(vac, PumpConfig(g=g), ctrl(_FIG12_TAU)) for g in _FIG12_G}
    tau = trajs[_FIG12_G[0]].tau_grid
    report.datasets.append(FigureDataset(
        name="fig1a",
        columns={"tau": tau, **{f"u_g{g:.1f}": trajs[g].u for g in _FIG12_G}},
    ))
    report.datasets.append(FigureDataset(
        name="fig1b",
        columns={"tau": tau, **{f"n_th_g{g:.1f}": trajs[g].n_th for g in _FIG12_G}},
    ))
    for label, g in zip(("fig2a", "fig2b", "fig2c"), _FIG12_G):
        cols = _evolve_columns(trajs[g])
        cols.pop("u")
        cols.pop("n_th")
        cols.pop("g2")
        report.datasets.append(FigureDataset(name=label, columns=cols))

    trajs3 = {g: integrate(vac, PumpConfig(g=g), ctrl(_FIG12_TAU)) for g in _FIG3_G}
    tau3 = trajs3[_FIG3_G[0]].tau_grid
    for label, attr in (("fig3a", "dx"), ("fig3b", "dy")):
        cols = {"tau": tau3}
        for g in _FIG3_G:
            cols[f"{attr}_g{g:.1f}"] = getattr(trajs3[g], attr)
        for g in _FIG3_G:
            ref = getattr(quad_limits(g), f"{attr}_ss")
            cols[f"{attr}_ss_g{g:.1f}"] = np.full_like(tau3, ref)
        report.datasets.append(FigureDataset(name=label, columns=cols))

    g_grid = np.round(np.arange(0.01, 1.0, 0.01), 10)
    ss = [steady_state(g) for g in g_grid]
    report.datasets.append(FigureDataset(
        name="fig4",
        columns={
            "g": g_grid,
            "g2_ss": np.array([s.g2_ss for s in ss]),
            "n_mean_ss": np.array([s.n_mean_ss for s in ss]),
            "n_th_ss": np.array([s.n_th_ss for s in ss]),
        },
    ))
    n_grid = np.geomspace(1e-3, 1e2, 101)
    g_of_n = np.sqrt(2.0 * n_grid / (1.0 + 2.0 * n_grid))
    report.datasets.append(FigureDataset(
        name="fig4-inset",
        columns={
            "n_mean": n_grid,
            "g2_sts": np.array([g2_ss(g) for g in g_of_n]),
            "g2_svs": np.array([svs_g2(n) for n in n_grid]),
        },
    ))

    trajs5 = {g: integrate(vac, PumpConfig(g=g), ctrl(_FIG5A_TAU)) for g in _FIG5A_G}
    tau5 = trajs5[_FIG5A_G[0]].tau_grid
    cols = {"tau": tau5}
    for g in _FIG5A_G:
        cols[f"dx_g{_g_label(g)}"] = trajs5[g].dx
    for g in _FIG5A_G:
        cols[f"dx_ss_g{_g_label(g)}"] = np.full_like(tau5, quad_limits(g).dx_ss)
    report.datasets.append(FigureDataset(name="fig5a", columns=cols))

    tctrl = IntegrationControl(tau_end=_THRESHOLD_TAU, dtau=dtau, sample_every=every)
    by_delta = {}
    for delta in _FIG56_DELTAS:
        results = [find_threshold(g, delta, tctrl) for g in _FIG56_G]
        by_delta[delta] = results
    g_arr = np.asarray(_FIG56_G)
    report.datasets.append(FigureDataset(
        name="fig5b",
        columns={"g": g_arr, **{
            f"product_delta{_g_label(d)}": np.array(
                [uncertainty_product(r.state_at_threshold) for r in by_delta[d]]
            )
            for d in _FIG56_DELTAS
        }},
    ))
    report.datasets.append(FigureDataset(
        name="fig6",
        columns={"g": g_arr, **{
            f"g2_delta{_g_label(d)}": np.array(
                [r.observables_at_threshold.g2 for r in by_delta[d]]
            )
            for d in _FIG56_DELTAS
        }},
    ))
    tail = int(0.9 * len(tau))
    u_weak = trajs[0.8].u
    report.summary["invariant_checks"] = {
        # relative tail change: saturating curves move < 5% of their level
        "fig1_g0.8_saturates": bool(
            abs(u_weak[-1] - u_weak[tail]) < 0.05 * u_weak[-1]
        ),
        "fig1_g1.2_n_th_increasing": bool(np.all(np.diff(trajs[1.2].n_th) > 0.0)),
    }


_RUNNERS = {
    "evolve": _run_evolve,
    "steady": _run_steady,
    "threshold": _run_threshold,
    "oracle-compare": _run_oracle_compare,
    "figures": _run_figures,
}


def _failure(unit, err):
    return {"unit": unit, "error": type(err).__name__, "message": str(err)}


def run_scenario(config, write=True):
    """Execute a RunConfig; returns a ScenarioReport.

    Solver errors in one unit are recorded in report.failures and do not
    stop the others.  With write=True the datasets are emitted as CSVs
    under config.output_dir together with a manifest.json describing the
    run (parameters, files, invariant checks, failures).
    """
    report = ScenarioReport()
    report.summary["mode"] = config.mode
    _RUNNERS[config.mode](config, report)
    if write:
        for dataset in report.datasets:
            path = emit_csv(dataset, config.output_dir)
            report.files.append(path.name)
        report.files.sort()
        _write_manifest(config, report)
    return report


def _write_manifest(config, report):
    from pathlib import Path

    out = Path(config.output_dir)
    parameters = asdict(config)
    parameters.pop("output_dir")  # outputs must not depend on where they land
    manifest = {
        "mode": config.mode,
        "parameters": parameters,
        "files": report.files,
        "invariant_checks": report.summary.get("invariant_checks", {}),
        "failures": report.failures,
    }
    path = out / "manifest.json"
    try:
        out.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", "utf-8")
    except OSError as err:
        raise OSError(f"writing {path}: {err}") from err
    report.files.append(path.name)
