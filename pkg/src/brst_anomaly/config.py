"""Run configuration: flat ``key = value`` files plus ``--key=value`` overrides."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from importlib import resources
from pathlib import Path

from .star import SchemeSpec, weyl, wick
from .system import ConstraintSystem


class ConfigError(ValueError):
    """Invalid configuration (CLI exit status 2)."""


def load_fixture() -> dict:
    text = resources.files("brst_anomaly").joinpath("data/fixture.json").read_text()
    return json.loads(text)


_FIXTURE = load_fixture()
PROVENANCE = "fixture.json v{}: {}".format(_FIXTURE["fixture_version"], _FIXTURE["provenance"])


@dataclass(frozen=True)
class RunConfig:
    omega1: float = _FIXTURE["system"]["omega1"]
    omega2: float = _FIXTURE["system"]["omega2"]
    a: float = _FIXTURE["system"]["a"]
    b: float = _FIXTURE["system"]["b"]
    c: float = _FIXTURE["system"]["c"]
    E: float = _FIXTURE["system"]["E"]
    alpha: float = 2.0
    beta: float = 2.0
    scheme: str = "wick"
    hbar_order: int = 4
    zero_tol: float = 1e-12
    cert_tol: float = 1e-6
    degree_cap: int = 8
    seed: int = 0
    samples: int = 200
    phi_points: int = 8
    quad_points: int = 64
    orbit_steps: int = 10_000
    d1_samples: int = 200
    assoc_samples: int = 100

    def system(self) -> ConstraintSystem:
        return ConstraintSystem(self.omega1, self.omega2, self.a, self.b, self.c, self.E)

    def star_scheme(self) -> SchemeSpec:
        return weyl() if self.scheme == "weyl" else wick(self.alpha, self.beta)

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self, elliptic: bool = False) -> RunConfig:
        if self.alpha == 0 or self.beta == 0:
            raise ConfigError("alpha and beta must be nonzero reals")
        if self.scheme not in ("wick", "weyl"):
            raise ConfigError(f"scheme must be 'wick' or 'weyl', got {self.scheme!r}")
        if self.omega1 <= 0 or self.omega2 <= 0:
            raise ConfigError("omega1 and omega2 must be positive")
        if self.E <= 0:
            raise ConfigError("E must be positive")
        if self.hbar_order < 1:
            raise ConfigError("hbar_order must be >= 1")
        if self.zero_tol <= 0 or self.cert_tol <= 0:
            raise ConfigError("zero_tol and cert_tol must be positive")
        if self.degree_cap < 0:
            raise ConfigError("degree_cap must be >= 0")
        for name in ("samples", "phi_points", "quad_points", "d1_samples", "assoc_samples"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.samples < 2:
            raise ConfigError("samples must be >= 2")
        if self.orbit_steps < 100:
            raise ConfigError("orbit_steps must be >= 100")
        if elliptic:
            sys = self.system()
            if not (sys.is_positive_definite or sys.is_unperturbed):
                raise ConfigError(
                    f"quadratic form [[a, c], [c, b]] is not positive definite "
                    f"(a={self.a}, b={self.b}, c={self.c})"
                )
        return self


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(key: str, raw: str, where: str):
    if key not in _TYPES:
        raise ConfigError(f"{where}: unknown key {key!r}")
    kind = _TYPES[key]
    raw = raw.strip()
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"{where}: cannot read {key} = {raw!r} as {kind}") from None


def parse_config_text(text: str, source: str = "<config>") -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key in values:
            raise ConfigError(f"{where}: duplicate key {key!r}")
        values[key] = _convert(key, raw, where)
    return values


def parse_overrides(items: list[str]) -> dict:
    values = {}
    for item in items:
        if not item.startswith("--") or "=" not in item:
            raise ConfigError(f"unrecognised argument {item!r} (overrides look like --key=value)")
        key, raw = item[2:].split("=", 1)
        values[key] = _convert(key, raw, f"override {item}")
    return values


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    values = {}
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {p}: {exc.strerror}") from None
        values.update(parse_config_text(text, str(p)))
    values.update(overrides or {})
    return replace(RunConfig(), **values)
