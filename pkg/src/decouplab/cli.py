"""Command-line front end: seeded experiments with reproducible artifacts.

Every run writes three files into the output directory: manifest.json
(config echo plus status, written before compute and finalised after),
results.csv (one row per sampled value, stable formatting), and
summary.json (derived quantities, sorted keys). Identical config and seed
give byte-identical results.csv.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import decoupling, ensembles, entropy, linalg, quantum, stats, typicality
from .entropy import SmoothingConfig
from .errors import ConfigError, DecouplabError

EXPERIMENTS = (
    "decouple-expect",
    "decouple-tail",
    "fqsw",
    "thermalize",
    "design-verify",
    "entropy",
    "typicality",
    "lipschitz",
    "moments",
)

ALLOWED_KEYS = {
    "experiment", "dims", "ensemble", "samples", "seed", "epsilon", "delta",
    "kappa", "output_dir", "t", "n", "probs",
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    dims: dict = field(default_factory=dict)
    ensemble: dict | None = None
    samples: int = 200
    seed: int = 0
    epsilon: float = 0.0
    delta: float = 0.0
    kappa: float = 0.5
    output_dir: str = ""
    t: int = 2
    n: int = 8
    probs: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                f"unknown experiment {self.experiment!r}; pick one of "
                f"{', '.join(EXPERIMENTS)}", field="experiment",
            )
        if self.samples < 1:
            raise ConfigError("samples must be a positive integer", field="samples")
        if self.epsilon < 0 or self.delta < 0:
            raise ConfigError("epsilon and delta must be nonnegative",
                              field="epsilon" if self.epsilon < 0 else "delta")
        if self.kappa <= 0:
            raise ConfigError("kappa must be positive", field="kappa")
        if self.t < 1:
            raise ConfigError("moment order t must be at least 1", field="t")
        if self.n < 1:
            raise ConfigError("copy count n must be at least 1", field="n")
        for k, v in self.dims.items():
            if not isinstance(v, int) or v < 1:
                raise ConfigError(f"dims[{k!r}] must be a positive integer",
                                  field="dims")

    @property
    def out_path(self) -> Path:
        return Path(self.output_dir or f"runs/{self.experiment}")


def load_config(path) -> ExperimentConfig:
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}", field="",
        ) from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object", field="")
    unknown = sorted(set(raw) - ALLOWED_KEYS)
    if unknown:
        raise ConfigError(
            f"{path}: unknown keys {', '.join(unknown)}; allowed keys are "
            f"{', '.join(sorted(ALLOWED_KEYS))}", field=unknown[0],
        )
    if "experiment" not in raw:
        raise ConfigError(f"{path}: missing required key 'experiment'",
                          field="experiment")
    if "probs" in raw and raw["probs"] is not None:
        raw = dict(raw)
        raw["probs"] = tuple(float(p) for p in raw["probs"])
    return ExperimentConfig(**raw)


def _dim(cfg: ExperimentConfig, key: str, default: int | None = None) -> int:
    if key in cfg.dims:
        return int(cfg.dims[key])
    if default is None:
        raise ConfigError(f"experiment {cfg.experiment!r} needs dims[{key!r}]",
                          field="dims")
    return default


def _ensemble(cfg: ExperimentConfig, dim: int) -> ensembles.UnitaryEnsemble:
    if cfg.ensemble is None:
        return ensembles.haar_ensemble(dim, seed=cfg.seed)
    e = ensembles.ensemble_from_json(cfg.ensemble)
    if e.dim != dim:
        raise ConfigError(
            f"ensemble dimension {e.dim} does not match the instance dimension {dim}",
            field="ensemble",
        )
    return e


def _smoothing(cfg: ExperimentConfig) -> SmoothingConfig:
    return SmoothingConfig(epsilon=cfg.epsilon, delta=cfg.delta, seed=cfg.seed)


def _random_instance(cfg: ExperimentConfig, channel=None):
    """Seeded random state on (A, R) with the requested channel on A."""
    a = _dim(cfg, "a")
    r = _dim(cfg, "r")
    rng = np.random.default_rng(cfg.seed)
    rho = quantum.random_state(linalg.shape(("A", a), ("R", r)), rng)
    if channel is None:
        b = _dim(cfg, "b", default=0)
        if b:
            if a % b != 0:
                raise ConfigError("dims['b'] must divide dims['a']", field="dims")
            channel = quantum.trace_out_channel(b, a // b)
        else:
            channel = quantum.identity_channel(a)
    return decoupling.DecouplingInstance(
        rho=rho, channel=channel, cfg=_smoothing(cfg), a_labels=("A",)
    )


# ---------------------------------------------------------------------------
# experiment drivers: each returns (summary dict, {series name: float array})


def run_decouple_expect(cfg: ExperimentConfig):
    inst = _random_instance(cfg)
    ens = _ensemble(cfg, inst.a_dim)
    choi_b = quantum.choi_state(inst.channel).marginal(["B"]).matrix
    f = np.array([
        decoupling.f_value(inst, ens.sample(i), choi_b=choi_b)
        for i in range(cfg.samples)
    ])
    bound = decoupling.dupuis_expectation_bound(inst)
    se = float(f.std(ddof=1) / math.sqrt(cfg.samples)) if cfg.samples > 1 else 0.0
    summary = {
        "mean_f": float(f.mean()),
        "std_error": se,
        "expectation_bound": bound,
        "bound_holds": bool(f.mean() <= bound + 3.0 * se),
        "ensemble": ensembles.ensemble_to_json(ens),
        "anchors": {
            "expectation_bound": "2^(-h2(A|R)/2 - h2(Ap|B)/2)",
        },
    }
    return summary, {"decouple-expect:f": f}


def run_decouple_tail(cfg: ExperimentConfig):
    inst = _random_instance(cfg)
    w = decoupling.prepare(inst)
    ens = _ensemble(cfg, inst.a_dim)
    choi_b = w.choi.marginal(["B"]).matrix
    f = np.empty(cfg.samples)
    g = np.empty(cfg.samples)
    for i in range(cfg.samples):
        u = ens.sample(i)
        f[i] = decoupling.f_value(inst, u, choi_b=choi_b)
        g[i] = decoupling.g_value(inst, u, w)
    moments = decoupling.haar_expected_g_squared(inst, w)
    mu = moments.mu_upper
    tail = None
    if mu < 1.0:
        tail = decoupling.tail_parameters(inst, w, cfg.kappa, mu)
    f_series = stats.SampleSeries(f, seed=cfg.seed, generator_tag="f")
    a_marg = inst.rho.marginal(["A"])
    hmin_log = entropy.hmin_smooth(a_marg, cfg.epsilon)
    hmin_printed = 2.0 ** (-hmin_log)
    summary = {
        "mean_f": float(f.mean()),
        "mean_g": float(g.mean()),
        "mu_closed_form": mu,
        "h2_eps": w.h2_eps,
        "h2_prime": w.h2_prime_val,
        "hmax_prime": w.hmax_prime_val,
        "tail": None if tail is None else tail.to_json(),
        "empirical_tail": None if tail is None
        else stats.empirical_tail(f_series, tail.threshold),
        "hmin_minus_log_reading": hmin_log,
        "hmin_printed_reading": hmin_printed,
        "hmin_note": (
            "printed definition reads as the clipped sup-norm itself; both "
            "readings are reported and the -log2 one feeds the alternate "
            "concentration denominator"
        ),
        "alt_concentration_denominator_minus_log": 2.0 ** (hmin_log + 4.0),
        "alt_concentration_denominator_printed": 2.0 ** (hmin_printed + 4.0),
        "ensemble": ensembles.ensemble_to_json(ens),
        "anchors": {
            "tail_a": "|A| 2^(-(1+delta) hmaxp + h2 - 9)",
            "threshold": "2^(-h2/2 - h2p/2 + 1) + 14 sqrt(eps) + 2 kappa",
            "bound": "5 * 2^(-a kappa^2)",
        },
    }
    return summary, {"decouple-tail:f": f, "decouple-tail:g": g}


def run_fqsw(cfg: ExperimentConfig):
    a1 = _dim(cfg, "a1")
    a2 = _dim(cfg, "a2")
    r = _dim(cfg, "r")
    inst, report = decoupling.fqsw_instance(a1, a2, r, cfg=_smoothing(cfg),
                                            seed=cfg.seed)
    w = decoupling.prepare(inst)
    ens = _ensemble(cfg, inst.a_dim)
    choi_b = w.choi.marginal(["B"]).matrix
    f = np.empty(cfg.samples)
    g = np.empty(cfg.samples)
    for i in range(cfg.samples):
        u = ens.sample(i)
        f[i] = decoupling.f_value(inst, u, choi_b=choi_b)
        g[i] = decoupling.g_value(inst, u, w)
    moments = decoupling.haar_expected_g_squared(inst, w)
    g2 = g * g
    se = float(g2.std(ddof=1) / math.sqrt(cfg.samples)) if cfg.samples > 1 else 0.0
    mu = moments.mu_upper
    tail = None
    if mu < 1.0:
        tail = decoupling.tail_parameters(inst, w, cfg.kappa, mu)
    lam_lo, lam_hi = decoupling.fqsw_lambda_sandwich(
        a1, a2, w.h2_eps, tail.t if tail is not None else 1.0
    )
    exp_bound = decoupling.dupuis_expectation_bound(inst)
    f_se = float(f.std(ddof=1) / math.sqrt(cfg.samples)) if cfg.samples > 1 else 0.0
    summary = {
        "closed_form": report,
        "mean_g_squared": float(g2.mean()),
        "g_squared_std_error": se,
        "closed_form_matches": bool(
            abs(g2.mean() - moments.expected_g_squared) <= 3.0 * se + 1e-12
        ),
        "expected_g_squared": moments.expected_g_squared,
        "alpha": moments.alpha,
        "beta": moments.beta,
        "eta": moments.eta,
        "mean_f": float(f.mean()),
        "expectation_bound": exp_bound,
        "expectation_bound_holds": bool(f.mean() <= exp_bound + 3.0 * f_se),
        "tail": None if tail is None else tail.to_json(),
        "lambda_window": [lam_lo, lam_hi],
        "ensemble": ensembles.ensemble_to_json(ens),
        "anchors": {
            "alpha": "(a1^2 a2^2 - a1^2) / (a1^2 a2^2 - 1)",
            "beta": "(a1/a2) (a1^2 a2^2 - a2^2) / (a1^2 a2^2 - 1)",
            "tail_a": "a2 2^(h2 - 9)",
            "lambda_window": "(0.008 a2^-9 a1^-13 2^-h2)^t .. (a2^-9 a1^-13 2^-h2)^t",
        },
    }
    return summary, {"fqsw:f": f, "fqsw:g": g}


def run_thermalize(cfg: ExperimentConfig):
    s = _dim(cfg, "s")
    e = _dim(cfg, "e")
    r = _dim(cfg, "r")
    rng = np.random.default_rng(cfg.seed)
    rho = quantum.random_state(linalg.shape(("Om", s * e), ("R", r)), rng)
    ens = _ensemble(cfg, s * e)
    smoothing = None
    if cfg.epsilon > 0 or cfg.delta > 0:
        smoothing = _smoothing(cfg)
    report = decoupling.thermalization_check(
        rho, s, e, cfg.kappa, ens, cfg.samples, cfg=smoothing
    )
    distances = np.array(report.pop("distances"))
    report["ensemble"] = ensembles.ensemble_to_json(ens)
    report["anchors"] = {
        "epsilon_default": "kappa^2 / 60",
        "tail_a": "(|Om|/|S|) 2^(h2 - 9)",
    }
    return report, {"thermalize:distance": distances}


def run_design_verify(cfg: ExperimentConfig):
    if cfg.ensemble is None:
        raise ConfigError("design-verify needs an ensemble descriptor",
                          field="ensemble")
    ens = ensembles.ensemble_from_json(cfg.ensemble)
    report = ensembles.qtpe_lambda(ens, cfg.t, samples=cfg.samples,
                                   seed=cfg.seed or 12345)
    summary = {
        "design": report.to_json(),
        "ensemble": ensembles.ensemble_to_json(ens),
        "anchors": {
            "lambda": "||moment operator - Haar projector||_inf at order t",
            "moment_deviation": "max over degrees k <= t of d^k entrywise gap",
        },
    }
    return summary, {"design-verify:lambda": np.array([report.lambda_value])}


def run_entropy(cfg: ExperimentConfig):
    a = _dim(cfg, "a")
    b = _dim(cfg, "b")
    rng = np.random.default_rng(cfg.seed)
    rho = quantum.random_state(linalg.shape(("A", a), ("B", b)), rng)
    scfg = _smoothing(cfg)
    eps = cfg.epsilon
    b_marg = rho.marginal(["B"])
    h2_fixed = entropy.h2_conditional(rho, scfg, "fixed_marginal", given="B")
    h2_min = entropy.h2_conditional(rho, scfg, "minimized", given="B")
    hmax = entropy.hmax_smooth(b_marg, eps)
    hmaxp, _ = entropy.hmax_prime(b_marg, eps)
    h2p, _ = entropy.h2_prime(rho, eps, cfg.delta, given="B")
    reports = [
        entropy.EntropyReport("shannon_joint", entropy.shannon(rho), "exact",
                              "exact"),
        entropy.EntropyReport("shannon_conditional",
                              entropy.shannon(rho, given="B"), "exact", "exact"),
        entropy.EntropyReport("h2_conditional", h2_fixed, "fixed_marginal",
                              "lower"),
        entropy.EntropyReport("h2_conditional_minimized", h2_min, "minimized",
                              "lower"),
        entropy.EntropyReport("hmax_b", hmax, "truncation", "upper"),
        entropy.EntropyReport("hmax_prime_b", hmaxp, "truncation", "upper"),
        entropy.EntropyReport("h2_prime_conditional", h2p, "canonical_point",
                              "lower"),
    ]
    summary: dict = {
        "dims": {"a": a, "b": b},
        "epsilon": eps,
        "delta": cfg.delta,
        "values": [r.to_json() for r in reports],
        "minimized_at_least_fixed": bool(h2_min >= h2_fixed - 1e-9),
        "hmax_sandwich_ok": bool(hmax <= hmaxp + 1e-9),
        "anchors": {
            "h2": "-2 log2 || (xi (x) I)^(-1/4) sigma (xi (x) I)^(-1/4) ||_2",
            "hmax": "2 log2 tr sqrt(sigma)",
            "hmax_prime": "-log2 (smallest kept eigenvalue)",
        },
    }
    if eps > 0:
        summary["hmax_prime_dimension_bound"] = math.log2(b / eps)
        summary["hmax_prime_dimension_ok"] = bool(
            hmaxp <= math.log2(b / eps) + 1e-9
        )
        summary["h2_upper_bound"] = entropy.h2_upper_bound_check(rho, scfg,
                                                                 given="B")
        rough = 4.0 * math.sqrt(eps)
        if rough < 1.0:
            h2_rough = entropy.h2_conditional(
                rho, SmoothingConfig(epsilon=rough), "fixed_marginal", given="B"
            )
            summary["h2_prime_sandwich"] = {
                "h2_at_4_sqrt_eps": h2_rough,
                "h2_prime": h2p,
                "ok": bool(h2_rough >= h2p - 1e-9),
            }
        hmin_log = entropy.hmin_smooth(b_marg, eps)
        summary["hmin_minus_log_reading"] = hmin_log
        summary["hmin_printed_reading"] = 2.0 ** (-hmin_log)
    return summary, {}


def run_typicality(cfg: ExperimentConfig):
    if cfg.probs is not None:
        probs = tuple(cfg.probs)
    else:
        x = _dim(cfg, "x", default=2)
        probs = tuple(1.0 / x for _ in range(x))
    eps = cfg.epsilon if cfg.epsilon > 0 else 0.5
    delta = cfg.delta if cfg.delta > 0 else 0.49
    spec = typicality.TypicalSpec(probs=probs, n=cfg.n, delta=delta)
    report = typicality.typical_report(spec, eps)
    hmaxp = typicality.hmax_prime_iid_check(np.array(probs), cfg.n, eps, delta)
    summary = {
        "probs": list(probs),
        "typical": report,
        "hmax_prime_iid": hmaxp,
        "anchors": {
            "n_threshold": "4 / (p_min delta^2) log2(|X|/eps)",
            "sandwich": "n(1-delta)H <= hmax_prime(n copies) <= n(1+delta)H",
        },
    }
    return summary, {}


def run_lipschitz(cfg: ExperimentConfig):
    inst = _random_instance(cfg)
    w = decoupling.prepare(inst)
    ens = _ensemble(cfg, inst.a_dim)
    lip = decoupling.lipschitz_bound(inst, w)
    gmax = decoupling.max_g_bound(inst, w)
    ratios = np.empty(cfg.samples)
    g = np.empty(cfg.samples)
    worst_gap = 0.0
    for i in range(cfg.samples):
        u = ens.sample(2 * i)
        v = ens.sample(2 * i + 1)
        gu = decoupling.g_value(inst, u, w)
        gv = decoupling.g_value(inst, v, w)
        dist = linalg.schatten_norm(u - v, 2)
        ratios[i] = abs(gu - gv) / dist if dist > 1e-12 else 0.0
        g[i] = gu
        worst_gap = max(worst_gap, gu - gmax)
    summary = {
        "lipschitz_bound": lip,
        "max_ratio": float(ratios.max()),
        "ratio_ok": bool(ratios.max() <= lip + 1e-9),
        "max_g_bound": gmax,
        "max_g_observed": float(g.max()),
        "max_g_ok": bool(worst_gap <= 1e-9),
        "ensemble": ensembles.ensemble_to_json(ens),
        "anchors": {
            "lipschitz": "2 * 2^((1+delta)/2 hmaxp - h2/2)",
            "max_g": "sqrt(2|A|) 2^((1+delta)/2 hmaxp - h2/2)",
        },
    }
    return summary, {"lipschitz:ratio": ratios, "lipschitz:g": g}


def run_moments(cfg: ExperimentConfig):
    inst = _random_instance(cfg)
    w = decoupling.prepare(inst)
    ens = _ensemble(cfg, inst.a_dim)
    g = np.array([
        decoupling.g_value(inst, ens.sample(i), w) for i in range(cfg.samples)
    ])
    series = stats.SampleSeries(g, seed=cfg.seed, generator_tag="g")
    moments = decoupling.haar_expected_g_squared(inst, w)
    mu_emp = float(g.mean())
    da = inst.a_dim
    dlt = inst.cfg.delta
    base = 2.0 ** ((1.0 + dlt) * w.hmax_prime_val - w.h2_eps + 4.0) / da
    moment_rows = []
    for m in (1, 2, 3):
        emp = stats.centralized_moment(series, mu_emp, 2 * m)
        moment_rows.append({
            "m": m,
            "empirical": emp,
            "bound": 2.0 * (m * base) ** m,
            "ok": bool(emp <= 2.0 * (m * base) ** m + 1e-12),
        })
    lip = decoupling.lipschitz_bound(inst, w)
    levy_a = da / (4.0 * lip * lip)
    clause = decoupling.mu_squared_clause(
        levy_a, moments.expected_g_squared, da, w.hmax_prime_val, w.h2_eps,
        mu_emp,
    )
    transfer = {
        "large_mu": stats.moment_transfer_check(2.0, 1.0, 10.0, 1,
                                                samples=200_000, seed=cfg.seed),
        "small_mu": stats.moment_transfer_check(2.0, 1.0, 0.1, 4,
                                                samples=200_000, seed=cfg.seed),
    }
    markov = stats.tail_from_moment(series, mu_emp, 2, cfg.kappa)
    levy = stats.levy_consistency(series, da, lip,
                                  [0.25 * lip, 0.5 * lip, lip])
    summary = {
        "mean_g": mu_emp,
        "expected_g_squared": moments.expected_g_squared,
        "haar_moment_bounds": moment_rows,
        "mu_squared_clause": clause,
        "moment_transfer": transfer,
        "markov_tail": markov,
        "levy": levy,
        "lipschitz_bound": lip,
        "ensemble": ensembles.ensemble_to_json(ens),
        "anchors": {
            "haar_moment_bound": "2 (m 2^((1+delta) hmaxp - h2 + 4) / |A|)^m",
            "levy_bound": "2 exp(-|A| kappa^2 / (4 L^2))",
        },
    }
    return summary, {"moments:g": g}


DRIVERS = {
    "decouple-expect": run_decouple_expect,
    "decouple-tail": run_decouple_tail,
    "fqsw": run_fqsw,
    "thermalize": run_thermalize,
    "design-verify": run_design_verify,
    "entropy": run_entropy,
    "typicality": run_typicality,
    "lipschitz": run_lipschitz,
    "moments": run_moments,
}


# ---------------------------------------------------------------------------
# artifact writing


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    # bool subclasses int, so it must be matched first
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    return x


def _config_echo(cfg: ExperimentConfig) -> dict:
    return _jsonable({
        "experiment": cfg.experiment,
        "dims": cfg.dims,
        "ensemble": cfg.ensemble,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "epsilon": cfg.epsilon,
        "delta": cfg.delta,
        "kappa": cfg.kappa,
        "t": cfg.t,
        "n": cfg.n,
        "probs": list(cfg.probs) if cfg.probs is not None else None,
    })


def _write_manifest(out: Path, cfg: ExperimentConfig, status: str,
                    error: str | None = None):
    manifest = {"config": _config_echo(cfg), "status": status}
    if error is not None:
        manifest["error"] = error
    out.joinpath("manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )


def _write_results(out: Path, cfg: ExperimentConfig, series: dict):
    with out.joinpath("results.csv").open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["experiment", "seed", "sample_index", "value"])
        for name in sorted(series):
            for i, v in enumerate(np.asarray(series[name], dtype=float)):
                writer.writerow([name, cfg.seed, i, "%.17g" % v])


def _write_summary(out: Path, summary: dict):
    out.joinpath("summary.json").write_text(
        json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n"
    )


def run_experiment(cfg: ExperimentConfig) -> Path:
    out = cfg.out_path
    out.mkdir(parents=True, exist_ok=True)
    _write_manifest(out, cfg, "running")
    try:
        summary, series = DRIVERS[cfg.experiment](cfg)
    except Exception as exc:
        _write_manifest(out, cfg, "failed", error=f"{type(exc).__name__}: {exc}")
        raise
    _write_results(out, cfg, series)
    _write_summary(out, summary)
    _write_manifest(out, cfg, "complete")
    return out


# ---------------------------------------------------------------------------
# entry point


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="decouplab",
        description="Seeded decoupling experiments with reproducible artifacts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment from a JSON config")
    p_run.add_argument("config", help="path to the experiment config")
    p_run.add_argument("--output-dir", default=None,
                       help="override the config's output directory")
    p_val = sub.add_parser("validate", help="check a config without running it")
    p_val.add_argument("config", help="path to the experiment config")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        if args.command == "run" and args.output_dir:
            cfg = dataclasses.replace(cfg, output_dir=args.output_dir)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        field_note = f" (key: {exc.field})" if exc.field else ""
        print(f"config error{field_note}: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        print(f"ok: {args.config} describes a valid "
              f"{cfg.experiment!r} experiment")
        return 0

    try:
        out = run_experiment(cfg)
    except ConfigError as exc:
        field_note = f" (key: {exc.field})" if exc.field else ""
        print(f"config error{field_note}: {exc}", file=sys.stderr)
        return 2
    except DecouplabError as exc:
        print(f"computation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {out}/manifest.json, results.csv, summary.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
