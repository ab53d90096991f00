"""Configuration-driven experiment runner.

A run is fully described by an INI config file plus a master seed; repeated
runs with the same pair produce byte-identical reports (float formatting is
pinned).  See the README for the config grammar and the CSV schemas.

Exit codes: 0 success, 2 invalid configuration, 3 failed hypothesis check,
4 I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .complexes import build_complex
from .connect import (
    ConnectionSystem,
    cech_system,
    constant_system,
    hyperbolic_geometric_system,
    hyperbolic_line_system,
    rips_system,
    stationary_indicator_system,
)
from .moments import ZetaCache, euler_moments
from .normapprox import (
    CltExperiment,
    GammaReport,
    HypothesisError,
    LadderReport,
    gamma_quantities,
    run_clt_experiment,
)
from .render import disk_svg, line_process_svg
from .space import BoxWindow, HyperbolicDiskWindow, MarkSpace, Window, sample_poisson

__all__ = ["ConfigError", "RunConfig", "parse_config", "run", "main"]

SCHEMA = "randcomplex-1"
TASKS = ("sample", "moments", "gamma", "clt", "render")


class ConfigError(Exception):
    """The run configuration is invalid."""


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(";", ",").split(",") if t.strip())


@dataclass
class RunConfig:
    """A validated run description; every run is reproducible from (config, seed)."""

    task: str
    seed: int
    out: Path
    threads: int
    window: Window
    system: ConnectionSystem
    a: tuple[float, ...]
    beta: float
    mc: dict
    clt: dict
    raw_text: str


def _parse_marks(text: str) -> MarkSpace:
    text = text.strip()
    if text == "point":
        return MarkSpace.point()
    if text == "uniform":
        return MarkSpace.uniform()
    if text.startswith("discrete:"):
        pairs = [t for t in text[len("discrete:"):].split(",") if t.strip()]
        values, probs = [], []
        for pair in pairs:
            v, p = pair.split("@")
            values.append(float(v))
            probs.append(float(p))
        return MarkSpace.discrete(values, probs)
    raise ConfigError(f"unknown mark space {text!r}")


def _build_window(cp: configparser.ConfigParser) -> Window:
    kind = cp.get("space", "kind", fallback="box").strip()
    if kind == "box":
        bounds_text = cp.get("space", "bounds", fallback="0,1")
        bounds = tuple(tuple(_floats(axis)) for axis in bounds_text.split(";") if axis.strip())
        for b in bounds:
            if len(b) != 2:
                raise ConfigError("each bounds axis needs exactly 'lo,hi'")
        marks = None
        if cp.has_option("space", "marks"):
            marks = _parse_marks(cp.get("space", "marks"))
        return BoxWindow(bounds, marks)
    if kind == "hyperbolic_disk":
        radius = cp.getfloat("space", "radius", fallback=1.0)
        density = cp.get("space", "radial_density", fallback="cosh").strip()
        return HyperbolicDiskWindow(radius, density)
    raise ConfigError(f"unknown space kind {kind!r}")


def _build_system(cp: configparser.ConfigParser, window: Window) -> ConnectionSystem:
    kind = cp.get("system", "kind", fallback=None)
    if kind is None:
        raise ConfigError("missing [system] kind")
    kind = kind.strip()
    alpha = cp.getint("system", "alpha", fallback=2)
    if kind == "constant":
        return constant_system(alpha, _floats(cp.get("system", "p")))
    if kind == "rips":
        metric = window.metric
        return rips_system(alpha, cp.getfloat("system", "r"), metric)
    if kind == "cech":
        if window.chart != "euclidean":
            raise ConfigError("the cech system requires a Euclidean window")
        return cech_system(alpha, cp.getfloat("system", "r"))
    if kind == "hyperbolic_geometric":
        if not isinstance(window, HyperbolicDiskWindow):
            raise ConfigError("hyperbolic_geometric requires a hyperbolic disk window")
        return hyperbolic_geometric_system(alpha, cp.getfloat("system", "r"), _floats(cp.get("system", "p")))
    if kind == "hyperbolic_lines":
        if not isinstance(window, HyperbolicDiskWindow):
            raise ConfigError("hyperbolic_lines requires a hyperbolic disk window")
        return hyperbolic_line_system(cp.getfloat("system", "p"))
    if kind == "stationary_indicator":
        return stationary_indicator_system(alpha, cp.getfloat("system", "r0"))
    raise ConfigError(f"unknown system kind {kind!r}")


def parse_config(path: Path, overrides: dict | None = None) -> RunConfig:
    """Parse and fully validate a run config before any computation."""
    path = Path(path)
    try:
        raw_text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(raw_text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    overrides = overrides or {}

    try:
        task = overrides.get("task") or cp.get("run", "task", fallback="sample").strip()
        if task not in TASKS:
            raise ConfigError(f"unknown task {task!r}")
        seed = overrides.get("seed")
        if seed is None:
            seed = cp.getint("run", "seed", fallback=0)
        out = Path(overrides.get("out") or cp.get("run", "out", fallback="out"))
        threads = overrides.get("threads") or cp.getint("run", "threads", fallback=1)

        window = _build_window(cp)
        system = _build_system(cp, window)

        a_text = cp.get("euler", "a", fallback=None)
        if a_text is None:
            a = tuple((-1.0) ** i for i in range(system.alpha + 1))
        else:
            a = _floats(a_text)
        if len(a) != system.alpha + 1:
            raise ConfigError("coefficient vector length must be alpha + 1")

        beta = cp.getfloat("mc", "beta", fallback=10.0)
        if beta <= 0:
            raise ConfigError("beta must be positive")
        mc = {
            "zeta_samples": cp.getint("mc", "zeta_samples", fallback=20000),
            "replicates": cp.getint("mc", "replicates", fallback=5000),
            "outer": cp.getint("mc", "outer", fallback=400),
            "inner": cp.getint("mc", "inner", fallback=120),
            "fourth": cp.getint("mc", "fourth", fallback=1500),
        }
        clt = {}
        if cp.has_section("clt"):
            clt = {
                "regime": cp.get("clt", "regime", fallback="increasing_intensity").strip(),
                "betas": _floats(cp.get("clt", "betas", fallback="")),
                "lengths": _floats(cp.get("clt", "lengths", fallback="")),
                "dim": cp.getint("clt", "dim", fallback=1),
                "beta": cp.getfloat("clt", "beta", fallback=beta),
                "replicates": cp.getint("clt", "replicates", fallback=2000),
                "include_gammas": cp.getboolean("clt", "include_gammas", fallback=False),
            }
    except ConfigError:
        raise
    except (ValueError, configparser.Error) as exc:
        raise ConfigError(str(exc)) from exc

    return RunConfig(task, int(seed), out, int(threads), window, system, a, beta, mc, clt, raw_text)


# ---------------------------------------------------------------------------
# report writers


def _write(path: Path, text: str) -> None:
    path.write_text(text)


def _csv_lines(header: list[str], rows: list[list], task: str) -> str:
    lines = [f"# schema={SCHEMA} task={task}", ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _manifest(config: RunConfig) -> str:
    digest = hashlib.sha256(config.raw_text.encode()).hexdigest()
    lines = [
        f"schema={SCHEMA}",
        f"task={config.task}",
        f"seed={config.seed}",
        f"config_sha256={digest}",
        "",
        "--- config ---",
        config.raw_text.rstrip("\n"),
        "",
    ]
    return "\n".join(lines)


def _moments_rows(report) -> tuple[list[str], list[list]]:
    header = ["quantity", "m", "l", "value", "se", "samples", "empirical", "empirical_se"]
    rows: list[list] = []
    emp = report.empirical
    for m, est in enumerate(report.count_means, start=1):
        e_val = "" if emp is None else emp.counts_mean[m - 1]
        e_se = "" if emp is None else emp.counts_mean_se[m - 1]
        rows.append(["E_f", m, "", est.value, est.standard_error, est.samples, e_val, e_se])
    for (m, l), est in sorted(report.count_covariances.items()):
        e_val = "" if emp is None else emp.counts_cov[m - 1, l - 1]
        e_se = "" if emp is None else emp.counts_cov_se[m - 1, l - 1]
        rows.append(["Cov_f", m, l, est.value, est.standard_error, est.samples, e_val, e_se])
    rows.append(["E_chi", "", "", report.mean.value, report.mean.standard_error, report.mean.samples,
                 "" if emp is None else emp.chi_mean, "" if emp is None else emp.chi_mean_se])
    rows.append(["Var_chi", "", "", report.variance.value, report.variance.standard_error,
                 report.variance.samples, "" if emp is None else emp.chi_var,
                 "" if emp is None else emp.chi_var_se])
    lb = report.variance_lower_bound
    rows.append(["Var_chi_lower_bound", "", "", lb.value, lb.standard_error, lb.samples, "", ""])
    for k, est in enumerate(report.fock_components, start=1):
        rows.append([f"fock_k{k}", "", "", est.value, est.standard_error, est.samples, "", ""])
    return header, rows


def _gamma_rows(rep: GammaReport) -> tuple[list[str], list[list]]:
    header = ["quantity", "value", "se"]
    rows = [[f"gamma{i + 1}", g.value, g.standard_error] for i, g in enumerate(rep.gammas)]
    rows.append(["wasserstein_bound", rep.wasserstein_bound.value, rep.wasserstein_bound.standard_error])
    rows.append(["kolmogorov_bound", rep.kolmogorov_bound.value, rep.kolmogorov_bound.standard_error])
    rows.append(["fourth_moment", rep.fourth_moment.value, rep.fourth_moment.standard_error])
    rows.append(["fourth_moment_bound", rep.fourth_moment_bound, 0.0])
    rows.append(["mean", rep.mean, 0.0])
    rows.append(["sd", rep.sd, 0.0])
    return header, rows


def _clt_rows(report: LadderReport) -> tuple[list[str], list[list]]:
    header = ["rung", "parameter", "replicates", "ks", "mean", "sd"]
    header += [f"gamma{i}" for i in range(1, 7)] + [f"gamma{i}_se" for i in range(1, 7)]
    rows = []
    for i, rung in enumerate(report.rungs):
        row = [i, rung.parameter, rung.replicates, rung.ks, rung.mean, rung.sd]
        if rung.gammas is not None:
            row += [g.value for g in rung.gammas.gammas]
            row += [g.standard_error for g in rung.gammas.gammas]
        else:
            row += [""] * 12
        rows.append(row)
    if report.ks_slope is not None:
        tail = ["slope", "", "", report.ks_slope, "", ""]
        if report.gamma_slopes:
            tail += [report.gamma_slopes.get(f"gamma{i}") for i in range(1, 7)] + [""] * 6
        else:
            tail += [""] * 12
        rows.append(tail)
    return header, rows


# ---------------------------------------------------------------------------
# tasks


def _task_sample(config: RunConfig) -> None:
    rng = np.random.default_rng(config.seed)
    pts = sample_poisson(config.window, config.beta, rng)
    sample = build_complex(pts, config.system, int(rng.integers(0, 1 << 63)))
    _write(config.out / "complex.txt", sample.dump())
    counts = sample.f_counts()
    header = ["dimension", "count"]
    rows = [[j, int(c)] for j, c in enumerate(counts)]
    _write(config.out / "counts.csv", _csv_lines(header, rows, "sample"))
    if config.window.chart == "hyperbolic":
        _write(config.out / "complex.svg", disk_svg(sample))


def _task_render(config: RunConfig) -> None:
    if config.window.chart != "hyperbolic":
        raise ConfigError("the render task requires a hyperbolic disk window")
    rng = np.random.default_rng(config.seed)
    pts = sample_poisson(config.window, config.beta, rng)
    sample = build_complex(pts, config.system, int(rng.integers(0, 1 << 63)))
    if config.system.label == "hyperbolic_lines":
        _write(config.out / "lines.svg", line_process_svg(sample))
    _write(config.out / "complex.svg", disk_svg(sample))


def _task_moments(config: RunConfig) -> None:
    cache = ZetaCache(config.window, config.system, samples=config.mc["zeta_samples"], seed=config.seed)
    report = euler_moments(
        np.asarray(config.a), config.beta, config.window, config.system,
        cache=cache, empirical_replicates=config.mc["replicates"], seed=config.seed,
    )
    header, rows = _moments_rows(report)
    _write(config.out / "moments.csv", _csv_lines(header, rows, "moments"))
    payload = {
        "schema": SCHEMA,
        "beta": config.beta,
        "a": list(config.a),
        "mean": {"value": report.mean.value, "se": report.mean.standard_error},
        "variance": {"value": report.variance.value, "se": report.variance.standard_error},
        "variance_lower_bound": {
            "value": report.variance_lower_bound.value,
            "se": report.variance_lower_bound.standard_error,
        },
    }
    _write(config.out / "moments.json", json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _task_gamma(config: RunConfig) -> None:
    report = gamma_quantities(
        config.beta, config.window, config.system, np.asarray(config.a),
        outer_samples=config.mc["outer"], inner_replicates=config.mc["inner"],
        seed=config.seed, threads=config.threads,
        zeta_samples=config.mc["zeta_samples"], fourth_replicates=config.mc["fourth"],
    )
    header, rows = _gamma_rows(report)
    _write(config.out / "gamma.csv", _csv_lines(header, rows, "gamma"))


def _task_clt(config: RunConfig) -> None:
    clt = config.clt
    if not clt:
        raise ConfigError("the clt task needs a [clt] section")
    regime = clt["regime"]
    marks = config.window.marks if isinstance(config.window, BoxWindow) else None
    if regime == "increasing_intensity":
        exp = CltExperiment(
            regime=regime, a=config.a, system=config.system,
            replicates=clt["replicates"], betas=tuple(clt["betas"]), window=config.window,
            zeta_samples=config.mc["zeta_samples"], include_gammas=clt["include_gammas"],
            gamma_outer=config.mc["outer"], gamma_inner=config.mc["inner"],
            fourth_replicates=config.mc["fourth"], threads=config.threads,
        )
    else:
        dim = clt["dim"]
        windows = tuple(
            BoxWindow(tuple((0.0, L) for _ in range(dim)), marks) for L in clt["lengths"]
        )
        exp = CltExperiment(
            regime=regime, a=config.a, system=config.system,
            replicates=clt["replicates"], windows=windows, beta=clt["beta"],
            marks=marks, dim=dim, zeta_samples=config.mc["zeta_samples"],
            include_gammas=clt["include_gammas"], gamma_outer=config.mc["outer"],
            gamma_inner=config.mc["inner"], fourth_replicates=config.mc["fourth"],
            threads=config.threads,
        )
    report = run_clt_experiment(exp, seed=config.seed)
    header, rows = _clt_rows(report)
    _write(config.out / "clt.csv", _csv_lines(header, rows, "clt"))
    if report.stationary is not None:
        alpha = config.system.alpha
        header = ["m", "l", "sigma", "sigma_se", "empirical_cov_scaled", "empirical_se"]
        rows = []
        last = report.rungs[-1]
        cov = last.extras["cov_scaled"]
        cov_se = last.extras["cov_scaled_se"]
        for m in range(alpha + 1):
            for l in range(alpha + 1):
                rows.append([
                    m + 1, l + 1,
                    report.stationary.sigma[m, l], report.stationary.sigma_se[m, l],
                    cov[m, l], cov_se[m, l],
                ])
        _write(config.out / "sigma.csv", _csv_lines(header, rows, "clt"))


def run(config: RunConfig) -> None:
    """Execute a validated run; artifacts land in the output directory."""
    config.out.mkdir(parents=True, exist_ok=True)
    _write(config.out / "manifest.txt", _manifest(config))
    task = {
        "sample": _task_sample,
        "render": _task_render,
        "moments": _task_moments,
        "gamma": _task_gamma,
        "clt": _task_clt,
    }[config.task]
    task(config)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="randcomplex", description=__doc__)
    parser.add_argument("--config", required=True, help="path to the INI run config")
    parser.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
    parser.add_argument("--out", default=None, help="output directory (overrides config)")
    parser.add_argument("--threads", type=int, default=None, help="worker threads (overrides config)")
    parser.add_argument("--task", default=None, choices=TASKS, help="task (overrides config)")
    args = parser.parse_args(argv)

    overrides = {
        "seed": args.seed,
        "out": args.out,
        "threads": args.threads,
        "task": args.task,
    }
    try:
        config = parse_config(Path(args.config), {k: v for k, v in overrides.items() if v is not None})
        run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except HypothesisError as exc:
        print(f"hypothesis check failed: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
