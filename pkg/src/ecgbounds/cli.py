"""Command-line front end: ``ecgbounds {integrals,optimize,bounds,verify}``.

Exit codes: 0 success, 2 configuration problems (including unsupported
electron counts), 3 numerical failures or failed oracle comparisons.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from .basis_io import read_basis, write_basis
from .config import RunConfig, load_config, parse_config
from .errors import ConfigError, EcgError, UnsupportedElectronCount
from .hsq import h2_terms
from .spectral import (BasisSampler, OptimizationBudget, build_spectral_matrices, compute_bounds, grow_basis,
                       stochastic_optimize)
from .verification import kernel_checks

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

log = logging.getLogger("ecgbounds")

DEFAULT_CONFIG = """
[system]
charges = [2.0]
positions = [[0.0, 0.0, 0.0]]
electrons = 2

[basis]
size = 4
seed = 3
shift_range = 0.4
floating = true
"""


def empty_report(command: str, config: RunConfig | None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config.echo() if config else None,
        "energy_upper": None,
        "variance": None,
        "bounds": None,
        "interval": None,
        "per_term_h2": None,
        "trace": None,
        "integrals": None,
        "timings": {},
        "basis_file_path": None,
        "errors": [],
    }


def _finite(obj, path, notes):
    if isinstance(obj, float) and not math.isfinite(obj):
        notes.append(f"{path} was {obj!r}")
        return None
    if isinstance(obj, dict):
        return {k: _finite(v, f"{path}.{k}", notes) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v, f"{path}[{i}]", notes) for i, v in enumerate(obj)]
    if isinstance(obj, np.generic):
        return _finite(obj.item(), path, notes)
    return obj


def write_report(report: dict, out: Path) -> Path:
    notes: list[str] = []
    clean = _finite(report, "report", notes)
    clean["errors"] = list(clean["errors"]) + [f"non-finite value replaced by null: {n}" for n in notes]
    path = out / "report.json"
    path.write_text(json.dumps(clean, indent=2) + "\n")
    return path


def resolve_threads(arg: int | None) -> int:
    if arg is not None:
        return max(1, arg)
    env = os.environ.get("GAUSS_BOUNDS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"GAUSS_BOUNDS_THREADS must be an integer, got {env!r}") from exc
    return 1


def _sampler(cfg: RunConfig) -> BasisSampler:
    b = cfg.basis
    return BasisSampler(cfg.system.n_electrons, tuple(b.exponent_range), tuple(b.correlation_range),
                        b.shift_range, b.floating)


def _parity(cfg: RunConfig):
    return 1 if cfg.basis.symmetrize and cfg.system.n_electrons == 2 else None


def obtain_basis(cfg: RunConfig, report: dict, threads: int, optimize: bool):
    """Read or generate the basis, then run optimisation sweeps if requested."""
    t0 = time.perf_counter()
    parity = _parity(cfg)
    if cfg.basis.file:
        path = Path(cfg.basis.file)
        if not path.is_absolute() and cfg.source:
            path = Path(cfg.source).parent / path
        try:
            basis = read_basis(path)
        except OSError as exc:
            raise ConfigError(f"cannot read basis file {path}: {exc}") from exc
        if basis[0].n != cfg.system.n_electrons:
            raise ConfigError("basis file and [system] disagree on the electron count")
        trace = []
    else:
        grown = grow_basis(cfg.system, cfg.basis.size, cfg.basis.trials, cfg.basis.seed, _sampler(cfg),
                           parity, threads=threads)
        basis = grown.basis
        trace = []
    report["timings"]["basis"] = time.perf_counter() - t0
    if optimize:
        t0 = time.perf_counter()
        res = stochastic_optimize(cfg.system, basis, OptimizationBudget(cfg.optimize.sweeps, cfg.optimize.trials),
                                  cfg.basis.seed + 1, _sampler(cfg), parity, threads)
        basis = res.basis
        trace = res.trace
        report["timings"]["optimize"] = time.perf_counter() - t0
    return basis, trace


def cmd_integrals(cfg: RunConfig, out: Path, threads: int) -> tuple[dict, int]:
    report = empty_report("integrals", cfg)
    if cfg.integrals.include_h2 and cfg.system.n_electrons != 2:
        raise UnsupportedElectronCount(
            f"squared-Hamiltonian kernels need 2 electrons, config has {cfg.system.n_electrons}")
    basis, _ = obtain_basis(cfg, report, threads, optimize=False)
    N = len(basis)
    pairs = [(k, l) for l in range(N) for k in range(l + 1)][: cfg.integrals.pairs]
    t0 = time.perf_counter()
    rows = kernel_checks(cfg.system, basis, pairs, cfg.oracle.samples, cfg.oracle.seed, cfg.oracle.sigma_limit,
                         cfg.oracle.radial_rel_tol, cfg.integrals.include_h2, cfg.quadrature)
    report["timings"]["checks"] = time.perf_counter() - t0
    report["integrals"] = [r.as_dict() for r in rows]
    failed = [r for r in rows if not r.passed]
    for r in rows:
        print(f"{'ok  ' if r.passed else 'FAIL'} {r.kernel:<36} pair={r.pair} analytic={r.analytic:+.12e} "
              f"oracle={r.oracle:+.12e} ({r.method}, dev={r.deviation:.2e})")
    if failed:
        report["errors"].append("oracle mismatch in: " + ", ".join(sorted({r.kernel for r in failed})))
        return report, EXIT_NUMERIC
    return report, EXIT_OK


def write_trace_csv(path: Path, trace) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sweep", "energy"])
        for i, e in enumerate(trace):
            w.writerow([i, repr(float(e))])


def cmd_optimize(cfg: RunConfig, out: Path, threads: int) -> tuple[dict, int]:
    report = empty_report("optimize", cfg)
    basis, trace = obtain_basis(cfg, report, threads, optimize=True)
    report["trace"] = [float(e) for e in trace]
    report["energy_upper"] = float(trace[-1])
    path = write_basis(out / "basis.json", basis)
    report["basis_file_path"] = str(path)
    write_trace_csv(out / "trace.csv", trace)
    print(f"energy after {cfg.optimize.sweeps} sweeps: {trace[-1]:.10f} hartree")
    return report, EXIT_OK


def cmd_bounds(cfg: RunConfig, out: Path, threads: int) -> tuple[dict, int]:
    report = empty_report("bounds", cfg)
    if cfg.system.n_electrons != 2:
        raise UnsupportedElectronCount("bounds need the squared Hamiltonian, which is implemented for 2 electrons")
    basis, trace = obtain_basis(cfg, report, threads, optimize=cfg.optimize.sweeps > 0)
    if trace:
        report["trace"] = [float(e) for e in trace]
    t0 = time.perf_counter()
    m = build_spectral_matrices(cfg.system, basis, _parity(cfg), True, cfg.quadrature, threads)
    report["timings"]["matrices"] = time.perf_counter() - t0
    beta = cfg.bounds.beta if cfg.bounds.beta_source == "explicit" else None
    b = compute_bounds(m, beta, cfg.bounds.stevenson_alpha)
    bounds = vars(b).copy()
    report["bounds"] = bounds
    report["energy_upper"] = b.energy_upper
    report["variance"] = b.variance
    report["interval"] = [b.temple_lb if b.temple_valid else None, b.energy_upper]
    k, l = cfg.bounds.term_pair
    if not (0 <= k < len(basis) and 0 <= l < len(basis)):
        raise ConfigError(f"bounds.term_pair {cfg.bounds.term_pair} outside the basis")
    report["per_term_h2"] = {"pair": [k, l], "terms": h2_terms(cfg.system, basis[k], basis[l], cfg.quadrature)}
    if not cfg.basis.file:
        report["basis_file_path"] = str(write_basis(out / "basis.json", basis))
    else:
        report["basis_file_path"] = cfg.basis.file
    lo = f"{b.temple_lb:.8f}" if b.temple_valid else "n/a (beta not above E)"
    print(f"E = {b.energy_upper:.10f}  variance = {b.variance:.6e}  beta = {b.beta} ({b.beta_source})")
    print(f"weinstein_lb = {b.weinstein_lb:.8f}  temple_lb = {lo}")
    if b.stevenson_lb is not None:
        print(f"stevenson_lb = {b.stevenson_lb:.8f} (alpha = {b.stevenson_alpha})")
    print(f"interval [{lo}, {b.energy_upper:.10f}]")
    return report, EXIT_OK


def cmd_verify(cfg: RunConfig, out: Path, threads: int) -> tuple[dict, int]:
    """Full oracle regression on the configured system plus the internal self-checks."""
    from .selfcheck import run_selfchecks

    report, code = cmd_integrals(cfg, out, threads)
    report["command"] = "verify"
    checks = run_selfchecks()
    report["selfchecks"] = [{"name": n, "passed": ok, "detail": d} for n, ok, d in checks]
    for name, ok, detail in checks:
        print(f"{'ok  ' if ok else 'FAIL'} {name:<36} {detail}")
    if not all(ok for _, ok, _ in checks):
        report["errors"].append("self-check failures: " + ", ".join(n for n, ok, _ in checks if not ok))
        code = EXIT_NUMERIC
    return report, code


COMMANDS = {"integrals": cmd_integrals, "optimize": cmd_optimize, "bounds": cmd_bounds, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ecgbounds", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", type=Path, help="TOML run configuration")
    p.add_argument("--seed", type=int, help="overrides basis.seed and oracle.seed")
    p.add_argument("--threads", type=int, help="worker cap (fallback: GAUSS_BOUNDS_THREADS, then 1)")
    p.add_argument("--out", type=Path, default=Path("."), help="directory for report.json and basis files")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    cfg = None
    try:
        if args.config is not None:
            cfg = load_config(args.config)
        elif args.command == "verify":
            cfg = parse_config(DEFAULT_CONFIG, "built-in")
        else:
            raise ConfigError(f"'{args.command}' needs --config")
        if args.seed is not None:
            cfg.basis.seed = args.seed
            cfg.oracle.seed = args.seed
        threads = resolve_threads(args.threads)
        args.out.mkdir(parents=True, exist_ok=True)
        report, code = COMMANDS[args.command](cfg, args.out, threads)
    except (ConfigError, UnsupportedElectronCount) as exc:
        print(f"error: {exc}", file=sys.stderr)
        _try_report(args, cfg, exc)
        return EXIT_CONFIG
    except EcgError as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        _try_report(args, cfg, exc)
        return EXIT_NUMERIC
    path = write_report(report, args.out)
    print(f"report written to {path}")
    return code


def _try_report(args, cfg, exc) -> None:
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        report = empty_report(args.command, cfg)
        report["errors"].append(f"{type(exc).__name__}: {exc}")
        write_report(report, args.out)
    except OSError:
        pass


if __name__ == "__main__":
    sys.exit(main())
