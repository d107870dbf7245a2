"""Command-line front end: outage sweeps, KL tables, and self-validation.

Configuration is a flat text file of `key = value` lines with `#` comments;
interferer energies and the target-SIR grid are given in dB and converted to
linear scale once at parse time.  CSV output is byte-deterministic for a
given (config, seed): fixed header, `.` decimal separator, 10 significant
digits.

Exit codes: 0 success, 1 usage/config error, 2 numerical failure,
3 validation failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate

from . import fading, montecarlo, moments, outage
from .moments import Scenario
from .outage import NumericalFailureError
from .specfun import DomainError, UnsupportedDomainError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VALIDATION = 3

SWEEP_HEADER = "gamma0_db,p_out_approx1,p_out_approx2,p_out_mc,mc_stderr"
KL_HEADER = "eta_int,mu_int,eta_user,mu_user,kl_approx1,kl_approx2"

# KL-table parameter rows used when no overrides are supplied:
# (eta_int, mu_int, eta_user, mu_user)
DEFAULT_KL_ROWS = (
    (0.1, 2.0, 0.1, 2.0),
    (0.1, 2.0, 0.1, 4.0),
    (0.1, 2.0, 0.9, 4.0),
    (0.1, 4.0, 0.9, 4.0),
    (0.9, 4.0, 0.9, 4.0),
)


class ConfigError(ValueError):
    """Bad config file or inconsistent option values."""


@dataclass(frozen=True)
class RunConfig:
    scenario: Scenario
    gamma0_db_start: float
    gamma0_db_stop: float
    gamma0_db_step: float
    mc_samples: int = 1_000_000
    seed: int = 0
    methods: frozenset = frozenset({"approx1", "approx2", "monte_carlo"})
    kl_bins: int = 200
    workers: int = 1

    def __post_init__(self):
        if not self.gamma0_db_step > 0.0:
            raise ConfigError("gamma0_db_step must be > 0")
        if not self.gamma0_db_start < self.gamma0_db_stop:
            raise ConfigError("gamma0_db_start must be < gamma0_db_stop")
        if len(self.gamma0_db_grid()) < 2:
            raise ConfigError("the gamma0 grid must have at least 2 points")
        if not self.methods:
            raise ConfigError("methods must be non-empty")
        bad = self.methods - set(outage.VALID_METHODS)
        if bad:
            raise ConfigError(f"unknown methods: {sorted(bad)}")
        if self.mc_samples < 1:
            raise ConfigError("mc_samples must be >= 1")
        if self.kl_bins < 10:
            raise ConfigError("kl_bins must be >= 10")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def gamma0_db_grid(self) -> np.ndarray:
        n = int(math.floor((self.gamma0_db_stop - self.gamma0_db_start)
                           / self.gamma0_db_step + 1e-9)) + 1
        return self.gamma0_db_start + self.gamma0_db_step * np.arange(n)


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def parse_config_text(text: str) -> dict:
    kv = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        kv[key.strip()] = value.strip()
    return kv


_CONFIG_KEYS = {
    "n_r", "n_i", "eta_user", "mu_user", "omega_user",
    "eta_int", "mu_int", "omega_int", "energies_db",
    "gamma0_db_start", "gamma0_db_stop", "gamma0_db_step",
    "mc_samples", "seed", "methods", "kl_bins", "workers",
}


def make_run_config(kv: dict, **overrides) -> RunConfig:
    """Build a validated RunConfig from parsed key/value strings."""
    unknown = set(kv) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = {"n_r", "eta_user", "mu_user", "eta_int", "mu_int",
               "energies_db", "gamma0_db_start", "gamma0_db_stop",
               "gamma0_db_step"} - set(kv)
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")
    try:
        energies_db = [float(tok) for tok in kv["energies_db"].split(",") if tok.strip()]
        user = fading.make_params(float(kv["eta_user"]), float(kv["mu_user"]),
                                  float(kv.get("omega_user", "1")))
        interferer = fading.make_params(float(kv["eta_int"]), float(kv["mu_int"]),
                                        float(kv.get("omega_int", "1")))
        scenario = Scenario(
            n_r=int(kv["n_r"]),
            user=user,
            interferer=interferer,
            energies=tuple(db_to_linear(e) for e in energies_db),
        )
        if "n_i" in kv and int(kv["n_i"]) != scenario.n_i:
            raise ConfigError(
                f"n_i = {kv['n_i']} but energies_db lists {scenario.n_i} entries")
        methods = kv.get("methods", "approx1,approx2,monte_carlo")
        config = RunConfig(
            scenario=scenario,
            gamma0_db_start=float(kv["gamma0_db_start"]),
            gamma0_db_stop=float(kv["gamma0_db_stop"]),
            gamma0_db_step=float(kv["gamma0_db_step"]),
            mc_samples=int(kv.get("mc_samples", "1000000")),
            seed=int(kv.get("seed", "0")),
            methods=frozenset(tok.strip() for tok in methods.split(",") if tok.strip()),
            kl_bins=int(kv.get("kl_bins", "200")),
            workers=int(kv.get("workers", "1")),
        )
    except (ValueError, DomainError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    if overrides:
        config = replace(config, **overrides)
    return config


def load_run_config(path: str, **overrides) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return make_run_config(parse_config_text(text), **overrides)


def _fmt(x) -> str:
    return "" if x is None else f"{x:.10g}"


def cmd_sweep(config: RunConfig, out) -> int:
    """Write one CSV row per target-SIR grid point; returns an exit code."""
    grid_db = config.gamma0_db_grid()
    grid_lin = np.array([db_to_linear(g) for g in grid_db])
    fit = moments.build_gamma_fit(config.scenario)

    mc_out = [None] * len(grid_db)
    mc_err = [None] * len(grid_db)
    if "monte_carlo" in config.methods:
        samples = montecarlo.simulate_exact_sir(
            config.scenario, config.mc_samples, config.seed, config.workers)
        p = montecarlo.empirical_outage(samples, grid_lin)
        mc_out = list(p)
        mc_err = list(np.sqrt(p * (1.0 - p) / config.mc_samples))

    failed = False
    lines = [SWEEP_HEADER]
    for idx, g_db in enumerate(grid_db):
        p1 = p2 = None
        if "approx1" in config.methods:
            try:
                p1 = outage.outage_approx1(config.scenario, fit, grid_lin[idx])
            except (NumericalFailureError, UnsupportedDomainError) as exc:
                print(f"sweep: approx1 failed at {g_db} dB: {exc}", file=sys.stderr)
                failed = True
        if "approx2" in config.methods:
            try:
                p2 = outage.outage_approx2(fit, grid_lin[idx])
            except (NumericalFailureError, UnsupportedDomainError) as exc:
                print(f"sweep: approx2 failed at {g_db} dB: {exc}", file=sys.stderr)
                failed = True
        lines.append(",".join([
            _fmt(g_db), _fmt(p1), _fmt(p2), _fmt(mc_out[idx]), _fmt(mc_err[idx]),
        ]))
    out.write("\n".join(lines) + "\n")
    return EXIT_NUMERICAL if failed else EXIT_OK


def cmd_kl_table(config: RunConfig, out, rows=DEFAULT_KL_ROWS) -> int:
    """KL divergences D(exact || approx law) for a table of parameter rows."""
    failed = False
    lines = [KL_HEADER]
    for eta_int, mu_int, eta_user, mu_user in rows:
        scenario = Scenario(
            n_r=config.scenario.n_r,
            user=fading.make_params(eta_user, mu_user, config.scenario.user.omega),
            interferer=fading.make_params(eta_int, mu_int,
                                          config.scenario.interferer.omega),
            energies=config.scenario.energies,
        )
        kl1 = kl2 = None
        try:
            fit = moments.build_gamma_fit(scenario)
            exact = montecarlo.simulate_exact_sir(
                scenario, config.mc_samples, config.seed, config.workers)
            law1 = montecarlo.sample_approx_law(
                scenario, fit, montecarlo.SOURCE_APPROX1, config.mc_samples,
                config.seed, config.workers)
            law2 = montecarlo.sample_approx_law(
                scenario, fit, montecarlo.SOURCE_APPROX2, config.mc_samples,
                config.seed, config.workers)
            kl1 = montecarlo.kl_divergence(exact, law1, config.kl_bins)
            kl2 = montecarlo.kl_divergence(exact, law2, config.kl_bins)
        except (NumericalFailureError, UnsupportedDomainError,
                montecarlo.EstimationError) as exc:
            print(f"kl-table: row {(eta_int, mu_int, eta_user, mu_user)} "
                  f"failed: {exc}", file=sys.stderr)
            failed = True
        lines.append(",".join([
            _fmt(eta_int), _fmt(mu_int), _fmt(eta_user), _fmt(mu_user),
            _fmt(kl1), _fmt(kl2),
        ]))
    out.write("\n".join(lines) + "\n")
    return EXIT_NUMERICAL if failed else EXIT_OK


def _validate_checks(config: RunConfig):
    """Yield (name, passed, detail) tuples for the validation report."""
    sc = config.scenario
    n = config.mc_samples
    fit = moments.build_gamma_fit(sc)

    est = montecarlo.simulate_cross_moments(sc, 1, n, config.seed, config.workers)
    m1, m2 = moments.user_norm_moments(sc)
    c1 = moments.cross_moment_1(sc, 1)
    c2 = moments.cross_moment_2(sc, 1)
    for name, ana, mc_val, tol in (
        ("user_norm_m1", m1, est["norm_m1"], 0.01),
        ("user_norm_m2", m2, est["norm_m2"], 0.01),
        ("cross_moment_1", c1, est["cross_m1"], 0.01),
        ("cross_moment_2", c2, est["cross_m2"], 0.02),
    ):
        rel = abs(mc_val - ana) / abs(ana)
        yield name, rel <= tol, f"analytic={ana:.6g} mc={mc_val:.6g} rel={rel:.2%}"

    norm, _ = integrate.quad(
        lambda y: fading.sum_power_pdf(y, sc.user, sc.n_r),
        1e-12, np.inf, limit=300)
    yield "sum_power_pdf_norm", abs(norm - 1.0) <= 1e-6, f"integral={norm:.9f}"

    # pdf/CDF consistency of both approximate laws at 0 dB
    cdf2, _ = integrate.quad(lambda g: outage.sir_pdf_approx2(fit, g),
                             1e-300, 1.0, limit=300)
    p2 = outage.outage_approx2(fit, 1.0)
    yield ("sir_pdf_approx2_cdf", abs(cdf2 - p2) <= 1e-7,
           f"quad={cdf2:.9f} closed={p2:.9f}")
    cdf1, _ = integrate.quad(lambda g: outage.sir_pdf_approx1(sc, fit, g),
                             1e-300, 1.0, limit=300)
    p1 = outage.outage_approx1(sc, fit, 1.0)
    yield ("sir_pdf_approx1_cdf", abs(cdf1 - p1) <= 1e-5,
           f"quad={cdf1:.9f} closed={p1:.9f}")

    # with Rayleigh interferers the first approximation collapses the
    # denominator exactly, so analytic and empirical outage must agree
    ray = Scenario(n_r=sc.n_r, user=sc.user,
                   interferer=fading.make_params(0.0, 0.5, sc.interferer.omega),
                   energies=(sc.energies[0],) * sc.n_i)
    ray_fit = moments.build_gamma_fit(ray)
    samples = montecarlo.simulate_exact_sir(ray, n, config.seed, config.workers)
    grid = np.array([db_to_linear(g) for g in (-5.0, 0.0, 5.0)])
    emp = montecarlo.empirical_outage(samples, grid)
    ana = np.array([outage.outage_approx1(ray, ray_fit, g) for g in grid])
    tol = max(0.005, 6.0 / math.sqrt(n))
    gap = float(np.max(np.abs(emp - ana)))
    yield ("rayleigh_exactness", gap <= tol,
           f"max gap={gap:.5f} tol={tol:.5f}")


def cmd_validate(config: RunConfig, out) -> int:
    status = EXIT_OK
    for name, passed, detail in _validate_checks(config):
        out.write(f"{'PASS' if passed else 'FAIL'} {name}: {detail}\n")
        if not passed:
            status = EXIT_VALIDATION
    out.write("validation " + ("passed" if status == EXIT_OK else "FAILED") + "\n")
    return status


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="outage",
        description="Outage probability of MRC with eta-mu co-channel interference.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("sweep", "kl-table", "validate"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the config file")
        if name != "validate":
            p.add_argument("--out", default=None,
                           help="output CSV path (default: stdout)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--workers", type=int, default=None,
                       help="override the config worker count")
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if getattr(args, "workers", None) is not None:
        overrides["workers"] = args.workers
    try:
        config = load_run_config(args.config, **overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    def run(stream) -> int:
        if args.command == "sweep":
            return cmd_sweep(config, stream)
        if args.command == "kl-table":
            return cmd_kl_table(config, stream)
        return cmd_validate(config, stream)

    out_path = getattr(args, "out", None)
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            return run(fh)
    return run(sys.stdout)


def app() -> None:
    raise SystemExit(main())
