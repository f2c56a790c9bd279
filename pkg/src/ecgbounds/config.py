"""TOML run configuration for the command-line front end."""
from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .quadrature import QuadratureSpec
from .system import SystemDefinition


@dataclass
class BasisConfig:
    file: str | None = None
    size: int = 16
    seed: int = 1
    trials: int = 50
    exponent_range: tuple[float, float] = (0.05, 500.0)
    correlation_range: tuple[float, float] = (0.01, 10.0)
    shift_range: float = 0.0
    symmetrize: bool = True
    floating: bool = False


@dataclass
class OptimizeConfig:
    sweeps: int = 0
    trials: int = 50


@dataclass
class BoundsConfig:
    beta_source: str = "ritz2"
    beta: float | None = None
    stevenson_alpha: float | None = None
    term_pair: tuple[int, int] = (0, 0)


@dataclass
class OracleConfig:
    samples: int = 1_000_000
    seed: int = 11
    sigma_limit: float = 4.0
    radial_rel_tol: float = 1e-8


@dataclass
class IntegralsConfig:
    pairs: int = 3
    include_h2: bool = True


@dataclass
class RunConfig:
    system: SystemDefinition
    basis: BasisConfig = field(default_factory=BasisConfig)
    optimize: OptimizeConfig = field(default_factory=OptimizeConfig)
    bounds: BoundsConfig = field(default_factory=BoundsConfig)
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    integrals: IntegralsConfig = field(default_factory=IntegralsConfig)
    source: str | None = None

    def echo(self) -> dict:
        return {
            "source": self.source,
            "system": {
                "charges": self.system.charges.tolist(),
                "positions": self.system.positions.tolist(),
                "electrons": self.system.n_electrons,
            },
            "basis": _plain(asdict(self.basis)),
            "optimize": asdict(self.optimize),
            "bounds": _plain(asdict(self.bounds)),
            "quadrature": asdict(self.quadrature),
            "oracle": asdict(self.oracle),
            "integrals": asdict(self.integrals),
        }


def _plain(d: dict) -> dict:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


def _section(cls, raw: dict, name: str):
    data = raw.get(name, {})
    if not isinstance(data, dict):
        raise ConfigError(f"[{name}] must be a table")
    known = cls.__dataclass_fields__
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"[{name}] has unknown keys: {', '.join(sorted(unknown))}")
    try:
        obj = cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{name}]: {exc}") from exc
    return obj


def _range(value, name):
    try:
        lo, hi = (float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a pair of numbers") from exc
    if not 0 < lo <= hi:
        raise ConfigError(f"{name} must be positive and ordered, got {value}")
    return lo, hi


def parse_config(text: str, source: str | None = None) -> RunConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        where = ""
        if getattr(exc, "lineno", None) is not None:
            where = f" (line {exc.lineno}, column {exc.colno})"
        raise ConfigError(f"{source or 'config'}: malformed TOML{where}: {exc}") from exc
    sys_raw = raw.get("system")
    if not isinstance(sys_raw, dict):
        raise ConfigError("missing [system] table")
    try:
        charges = np.asarray(sys_raw["charges"], dtype=float)
        positions = np.asarray(sys_raw.get("positions", [[0.0, 0.0, 0.0]] * len(charges)), dtype=float)
        electrons = int(sys_raw["electrons"])
    except KeyError as exc:
        raise ConfigError(f"[system] is missing {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[system]: {exc}") from exc
    if np.any(charges <= 0):
        raise ConfigError("nuclear charges must be positive")
    try:
        system = SystemDefinition(charges, positions, electrons)
    except ValueError as exc:
        raise ConfigError(f"[system]: {exc}") from exc

    basis = _section(BasisConfig, raw, "basis")
    basis.exponent_range = _range(basis.exponent_range, "basis.exponent_range")
    basis.correlation_range = _range(basis.correlation_range, "basis.correlation_range")
    if basis.size < 1 or basis.trials < 1:
        raise ConfigError("basis.size and basis.trials must be positive")
    optimize = _section(OptimizeConfig, raw, "optimize")
    if optimize.sweeps < 0 or optimize.trials < 1:
        raise ConfigError("optimize.sweeps must be >= 0 and optimize.trials >= 1")
    bounds = _section(BoundsConfig, raw, "bounds")
    if bounds.beta_source not in ("ritz2", "explicit"):
        raise ConfigError("bounds.beta_source must be 'ritz2' or 'explicit'")
    if bounds.beta_source == "explicit" and bounds.beta is None:
        raise ConfigError("bounds.beta is required when beta_source = 'explicit'")
    bounds.term_pair = tuple(int(v) for v in bounds.term_pair)
    quadrature = _section(QuadratureSpec, raw, "quadrature")
    oracle = _section(OracleConfig, raw, "oracle")
    integrals = _section(IntegralsConfig, raw, "integrals")
    return RunConfig(system, basis, optimize, bounds, quadrature, oracle, integrals, source)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, str(path))
