"""Command-line entry point: seeded scenarios with bit-stable CSV/JSON output.

Scenarios
---------
stein-check     Stein solution values, ODE residuals, and envelope checks on a
                (z, x) product grid.
chaos-compare   Sample a diagonal chaos, compare the empirical CDF against the
                normal, and certify the discrepancy against the non-uniform
                bound under a chosen tail model.
expfun-compare  The same comparison for the standardized Brownian exponential
                functional, certified against its explicit rate bound.
bound-only      Evaluate a bound curve (no sampling).

Determinism: for a fixed configuration and seed the output bytes are
identical across runs and across --workers values (sampling is chunked onto
Philox substreams keyed by chunk index, and reductions run in chunk order).
Floats are serialized with Python repr (shortest round-trip, up to 17
significant digits, '.' decimal separator).  CSV uses a header row, comma
separators, and LF line endings.  JSON uses the documented insertion order
and omits file paths so output is byte-comparable across locations.

Exit codes: 0 success, 2 certification violation, 1 usage or runtime error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import bounds, chaos, empirical, expfun, gaussian

__all__ = ["main", "run", "parse_config", "UsageError"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; 2 is reserved for certification failures
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


# flag name -> (type converter, help); merged per scenario below
_COMMON = {
    "seed": (int, "seed of the Philox substream family"),
    "samples": (int, "number of Monte Carlo samples / paths"),
    "z-min": (float, "left end of the z grid"),
    "z-max": (float, "right end of the z grid"),
    "z-count": (int, "number of z grid points"),
    "output": (str, "output file path ('-' for stdout)"),
    "format": (str, "output format: csv or json"),
    "slack-k": (float, "certification slack in binomial standard errors"),
    "workers": (int, "worker processes for sampling (does not affect output bytes)"),
}

_SCENARIO_FLAGS = {
    "stein-check": {
        "x-min": (float, "left end of the x grid"),
        "x-max": (float, "right end of the x grid"),
        "x-count": (int, "number of x grid points"),
    },
    "chaos-compare": {
        "q": (int, "chaos order (>= 2)"),
        "alphas": (str, "comma-separated kernel coefficients"),
        "tail": (str, "tail model: exact, markov, major, empirical, unit"),
        "c-q": (float, "chaos concentration constant (required for --tail major)"),
        "markov-p": (float, "Markov tail exponent"),
        "markov-moment": (float, "E|F|^p for the Markov tail"),
    },
    "expfun-compare": {
        "a": (float, "drift of the exponential functional"),
        "t": (float, "time horizon (> 0)"),
        "n-steps": (int, "path discretization steps (default 2000 * t / 0.1)"),
    },
    "bound-only": {
        "mean-abs": (float, "|E F| input of the bound"),
        "discrepancy": (float, "Stein discrepancy input of the bound (required)"),
        "tail": (str, "tail model: exact, markov, major, expfun, unit"),
        "q": (int, "chaos order for --tail major"),
        "c-q": (float, "chaos concentration constant for --tail major"),
        "markov-p": (float, "Markov tail exponent"),
        "markov-moment": (float, "E|F|^p for the Markov tail"),
        "a": (float, "drift, for --tail expfun"),
        "t": (float, "horizon, for --tail expfun"),
    },
}

_DEFAULTS = {
    "stein-check": {
        "seed": 0, "samples": 1, "z-min": -6.0, "z-max": 6.0, "z-count": 49,
        "output": None, "format": "csv", "slack-k": 3.0, "workers": 1,
        "x-min": -10.0, "x-max": 10.0, "x-count": 2001,
    },
    "chaos-compare": {
        "seed": 0, "samples": 100_000, "z-min": -8.0, "z-max": 8.0, "z-count": 161,
        "output": None, "format": "csv", "slack-k": 3.0, "workers": 1,
        "q": 2, "alphas": "1", "tail": "exact", "c-q": None,
        "markov-p": 6.0, "markov-moment": None,
    },
    "expfun-compare": {
        "seed": 0, "samples": 100_000, "z-min": -5.0, "z-max": 5.0, "z-count": 101,
        "output": None, "format": "csv", "slack-k": 3.0, "workers": 1,
        "a": 0.0, "t": 0.1, "n-steps": None,
    },
    "bound-only": {
        "seed": 0, "samples": 1, "z-min": -8.0, "z-max": 8.0, "z-count": 161,
        "output": None, "format": "csv", "slack-k": 3.0, "workers": 1,
        "mean-abs": 0.0, "discrepancy": None, "tail": "unit",
        "q": 2, "c-q": None, "markov-p": 6.0, "markov-moment": None,
        "a": 0.0, "t": 0.1,
    },
}

SCENARIOS = tuple(_DEFAULTS)


def _build_parser() -> _Parser:
    parser = _Parser(prog="nubes", description="non-uniform Berry-Esseen bound scenarios")
    sub = parser.add_subparsers(dest="scenario", metavar="SCENARIO")
    for name in SCENARIOS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        p.add_argument("--config", type=str, default=None, help="JSON config file (flags override it)")
        flags = dict(_COMMON)
        flags.update(_SCENARIO_FLAGS[name])
        for flag, (conv, help_text) in flags.items():
            p.add_argument(f"--{flag}", dest=flag.replace("-", "_"), type=conv, default=None, help=help_text)
    return parser


def _coerce(key: str, value, conv):
    if key == "alphas" and isinstance(value, (list, tuple)):
        return ",".join(repr(float(v)) for v in value)
    try:
        return conv(value)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"config key '{key}': cannot interpret {value!r}: {exc}") from exc


def parse_config(argv: Sequence[str]) -> dict:
    """Resolve scenario + settings from argv and an optional JSON config file."""
    parser = _build_parser()
    ns = parser.parse_args(list(argv))
    if ns.scenario is None:
        raise UsageError(f"a scenario is required: one of {', '.join(SCENARIOS)}")
    scenario = ns.scenario
    allowed = dict(_COMMON)
    allowed.update(_SCENARIO_FLAGS[scenario])

    cfg = dict(_DEFAULTS[scenario])
    if ns.config is not None:
        try:
            with open(ns.config, "r", encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config file {ns.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file {ns.config} is not valid JSON: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise UsageError(f"config file {ns.config} must hold a JSON object")
        unknown = sorted(set(file_cfg) - set(allowed))
        if unknown:
            raise UsageError(f"unknown config key(s) for {scenario}: {', '.join(unknown)}")
        for key, value in file_cfg.items():
            cfg[key] = _coerce(key, value, allowed[key][0])
    for flag in allowed:
        value = getattr(ns, flag.replace("-", "_"))
        if value is not None:
            cfg[flag] = value

    cfg["scenario"] = scenario
    _validate(cfg)
    return cfg


def _validate(cfg: dict):
    scenario = cfg["scenario"]
    if cfg["output"] is None:
        raise UsageError("--output is required")
    if cfg["format"] not in ("csv", "json"):
        raise UsageError(f"--format must be csv or json, got {cfg['format']!r}")
    if cfg["z-count"] < 1:
        raise UsageError(f"--z-count must be >= 1, got {cfg['z-count']}")
    if not cfg["z-min"] <= cfg["z-max"]:
        raise UsageError(f"--z-min must be <= --z-max, got {cfg['z-min']} > {cfg['z-max']}")
    if cfg["seed"] < 0:
        raise UsageError(f"--seed must be >= 0, got {cfg['seed']}")
    if cfg["workers"] < 1:
        raise UsageError(f"--workers must be >= 1, got {cfg['workers']}")
    if cfg["slack-k"] < 0:
        raise UsageError(f"--slack-k must be >= 0, got {cfg['slack-k']}")
    if scenario in ("chaos-compare", "expfun-compare") and cfg["samples"] < 1:
        raise UsageError(f"--samples must be >= 1, got {cfg['samples']}")
    if scenario == "stein-check":
        if cfg["x-count"] < 1:
            raise UsageError(f"--x-count must be >= 1, got {cfg['x-count']}")
        if not cfg["x-min"] <= cfg["x-max"]:
            raise UsageError("--x-min must be <= --x-max")
    if scenario == "chaos-compare":
        _parse_alphas(cfg["alphas"])
        if cfg["tail"] not in ("exact", "markov", "major", "empirical", "unit"):
            raise UsageError(f"--tail must be one of exact, markov, major, empirical, unit; got {cfg['tail']!r}")
    if scenario == "expfun-compare":
        if cfg["t"] <= 0:
            raise UsageError(f"--t must be > 0, got {cfg['t']}")
        if cfg["n-steps"] is not None and cfg["n-steps"] < 2:
            raise UsageError(f"--n-steps must be >= 2, got {cfg['n-steps']}")
    if scenario == "bound-only":
        if cfg["discrepancy"] is None:
            raise UsageError("--discrepancy is required for bound-only")
        if cfg["discrepancy"] < 0 or cfg["mean-abs"] < 0:
            raise UsageError("--discrepancy and --mean-abs must be >= 0")
        if cfg["tail"] not in ("exact", "markov", "major", "expfun", "unit"):
            raise UsageError(f"--tail must be one of exact, markov, major, expfun, unit; got {cfg['tail']!r}")


def _parse_alphas(text: str) -> tuple[float, ...]:
    try:
        alphas = tuple(float(part) for part in str(text).split(","))
    except ValueError as exc:
        raise UsageError(f"--alphas must be a comma-separated list of numbers, got {text!r}") from exc
    if not alphas:
        raise UsageError("--alphas must be nonempty")
    return alphas


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _json_value(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    return float(value)


def _write(cfg: dict, columns: list[str], rows: list[tuple], summary: dict):
    # parameters echoed in JSON exclude file paths and the worker count, so
    # bytes depend on neither where the output lands nor how it was computed
    params = {k: v for k, v in cfg.items() if k not in ("output", "format", "scenario", "workers")}
    if cfg["format"] == "csv":
        lines = [",".join(columns)]
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        text = "\n".join(lines) + "\n"
    else:
        payload = {
            "scenario": cfg["scenario"],
            "parameters": params,
            "columns": columns,
            "rows": [[_json_value(v) for v in row] for row in rows],
            "summary": summary,
        }
        text = json.dumps(payload, indent=2) + "\n"
    if cfg["output"] == "-":
        sys.stdout.write(text)
    else:
        with open(cfg["output"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _grid(lo: float, hi: float, count: int) -> np.ndarray:
    return np.linspace(lo, hi, count)


def _run_stein_check(cfg: dict) -> int:
    zs = _grid(cfg["z-min"], cfg["z-max"], cfg["z-count"])
    xs = _grid(cfg["x-min"], cfg["x-max"], cfg["x-count"])
    columns = ["z", "x", "f", "f_prime", "ode_residual", "lemma_flags"]
    rows = []
    all_ok = True
    for z in zs:
        f = gaussian.stein_value(z, xs)
        fp = gaussian.stein_derivative(z, xs)
        res = gaussian.stein_ode_residual_fd(z, xs)
        if z > 0.0:
            rep = gaussian.check_lemma(z, xs)
            flags = "".join(
                "1" if ok else "0"
                for ok in (rep.global_bound_ok, rep.center_value_ok, rep.center_derivative_ok)
            )
            all_ok = all_ok and flags == "111"
        else:
            flags = ""
        rows.extend(
            (float(z), float(x), float(fv), float(fpv), float(rv), flags)
            for x, fv, fpv, rv in zip(xs, f, fp, res)
        )
    summary = {"all_envelope_checks_ok": bool(all_ok)}
    _write(cfg, columns, rows, summary)
    return 0 if all_ok else 2


def _tail_model(cfg: dict, spec=None, samples=None) -> bounds.TailModel:
    kind = cfg["tail"]
    if kind == "unit":
        return bounds.UnitTail()
    if kind == "exact":
        if spec is not None and not (spec.q == 2 and len(spec.alphas) == 1):
            raise UsageError("--tail exact requires the rank-one q=2 chaos (--q 2 --alphas <one value>)")
        return bounds.ExactCdfTail(cdf=chaos.exact_cdf_q2_rank1)
    if kind == "markov":
        if cfg["markov-moment"] is None:
            raise UsageError("--tail markov requires --markov-moment")
        return bounds.MarkovTail(p=cfg["markov-p"], moment_p=cfg["markov-moment"])
    if kind == "major":
        if cfg["c-q"] is None:
            raise UsageError("--tail major requires --c-q")
        q = spec.q if spec is not None else cfg["q"]
        return bounds.MajorChaosTail(q=q, c_q=cfg["c-q"])
    if kind == "empirical":
        if samples is None:
            raise UsageError("--tail empirical is only available in chaos-compare")
        return bounds.EmpiricalTail.from_samples(samples)
    if kind == "expfun":
        params = expfun.ExpFunParams(a=cfg["a"], t=cfg["t"])
        return bounds.ExpFunTail(params=params, moments=expfun.moments(params))
    raise UsageError(f"unknown tail model {kind!r}")


_COMPARE_COLUMNS = [
    "z", "empirical_cdf", "normal_cdf", "discrepancy", "se", "bound", "uniform_bound", "violated",
]


def _compare_rows(report: empirical.CertifyReport, uniform: float) -> list[tuple]:
    return [
        (r.z, r.empirical_cdf, r.normal_cdf, r.discrepancy, r.standard_error, r.bound, uniform, r.violated)
        for r in report.rows
    ]


def _run_chaos_compare(cfg: dict) -> int:
    spec = chaos.normalize(chaos.DiagonalChaosSpec(q=cfg["q"], alphas=_parse_alphas(cfg["alphas"])))
    samples = chaos.sample_batch(spec, cfg["samples"], cfg["seed"], workers=cfg["workers"])
    if spec.q == 2:
        m4, _ = chaos.fourth_moment(spec)
    else:
        f4 = samples**4
        m4 = float(np.mean(f4))
    d = chaos.stein_discrepancy_upper(m4, spec.q)
    tail = _tail_model(cfg, spec=spec, samples=samples)
    zs = _grid(cfg["z-min"], cfg["z-max"], cfg["z-count"])
    inputs = bounds.BoundInputs(mean_abs=0.0, stein_discrepancy=d, tail=tail)
    bound_curve = bounds.evaluate_curve(inputs, zs)
    curve = empirical.discrepancy_curve(empirical.build_ecdf(samples), zs)
    report = empirical.certify(curve, bound_curve, k=cfg["slack-k"])
    summary = {
        "fourth_moment": m4,
        "stein_discrepancy": d,
        "uniform_bound": bounds.uniform_bound(inputs),
        "violations": report.n_violations,
    }
    _write(cfg, _COMPARE_COLUMNS, _compare_rows(report, bounds.uniform_bound(inputs)), summary)
    return report.exit_status


def _run_expfun_compare(cfg: dict) -> int:
    params = expfun.ExpFunParams(a=cfg["a"], t=cfg["t"])
    n_steps = cfg["n-steps"] if cfg["n-steps"] is not None else expfun.default_n_steps(params.t)
    path_cfg = expfun.PathConfig(n_steps=n_steps)
    m = expfun.moments(params)
    f = expfun.sample_batch(params, path_cfg, cfg["samples"], cfg["seed"], workers=cfg["workers"])
    standardized = expfun.standardize(f, m)
    zs = _grid(cfg["z-min"], cfg["z-max"], cfg["z-count"])
    curve = empirical.discrepancy_curve(empirical.build_ecdf(standardized), zs)
    rate = expfun.clt_rate_bound(params, m, zs)
    note = "bound targets the exact law; sampled paths carry unquantified discretization bias"
    report = empirical.certify(curve, rate, k=cfg["slack-k"], note=note)
    uniform = math.sqrt(expfun.discrepancy_sq_upper(params, m))
    summary = {
        "m_t": m.m_t,
        "sigma2_t": m.sigma2_t,
        "n_steps": n_steps,
        "uniform_bound": uniform,
        "violations": report.n_violations,
        "note": note,
    }
    _write(cfg, _COMPARE_COLUMNS, _compare_rows(report, uniform), summary)
    return report.exit_status


def _run_bound_only(cfg: dict) -> int:
    tail = _tail_model(cfg)
    inputs = bounds.BoundInputs(mean_abs=cfg["mean-abs"], stein_discrepancy=cfg["discrepancy"], tail=tail)
    zs = _grid(cfg["z-min"], cfg["z-max"], cfg["z-count"])
    curve = bounds.evaluate_curve(inputs, zs)
    uniform = bounds.uniform_bound(inputs)
    columns = ["z", "tail_term", "gaussian_term", "bound", "uniform_bound"]
    rows = [(r.z, r.tail_term, r.gaussian_term, r.bound, uniform) for r in curve.rows]
    _write(cfg, columns, rows, {"uniform_bound": uniform})
    return 0


_RUNNERS = {
    "stein-check": _run_stein_check,
    "chaos-compare": _run_chaos_compare,
    "expfun-compare": _run_expfun_compare,
    "bound-only": _run_bound_only,
}


def run(cfg: dict) -> int:
    """Execute a resolved configuration; returns the process exit code."""
    return _RUNNERS[cfg["scenario"]](cfg)


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"nubes: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return run(cfg)
    except UsageError as exc:
        print(f"nubes: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"nubes: error in scenario {cfg['scenario']}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
