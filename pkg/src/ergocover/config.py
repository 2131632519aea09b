"""Scenario configuration: a flat INI file with six sections.

Every key has a documented default, so an empty file is a valid scenario.
Keys whose default is ``auto`` are filled in from the field variant or the
other settings when the file is parsed.
"""
from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .domain import MOVING, STATIC, VARIANTS, Domain, GroundTruthField
from .errors import ConfigError

MODES = ("adaptive", "uniform-baseline")
FUSIONS = ("centralized", "per-robot")


def _opt(default, kind, doc, choices=None):
    return field(default=default, metadata={"kind": kind, "doc": doc, "choices": choices})


@dataclass(frozen=True)
class DomainSection:
    lower: tuple = _opt((0.0, 0.0), "pair", "lower-left corner of the search region (m)")
    upper: tuple = _opt((1.0, 1.0), "pair", "upper-right corner of the search region (m)")


@dataclass(frozen=True)
class FieldSection:
    variant: str = _opt(STATIC, "str", "ground-truth family", VARIANTS)
    amplitudes: tuple = _opt((1.0, 1.0), "floats", "peak value of each Gaussian component")
    sigmas: tuple = _opt((0.12, 0.12), "floats", "standard deviation of each component (m)")
    means: tuple = _opt(((0.25, 0.3), (0.72, 0.68)), "points", "component means, static variant (m)")
    start_means: tuple = _opt(((0.2, 0.3), (0.8, 0.7)), "points", "component means at t=0, moving variant (m)")
    end_means: tuple = _opt(((0.8, 0.3), (0.2, 0.7)), "points", "component means at t=t_sim, moving variant (m)")
    gamma: float = _opt(0.2, "float", "s-curve shape exponent in (0,1), moving variant")
    noise_std: float = _opt(0.0, "float", "additive Gaussian sensor noise std")


@dataclass(frozen=True)
class RobotsSection:
    count: int = _opt(4, "int", "number of robots")
    u_max: float = _opt(1.0, "float", "speed of every robot (m/s)")
    sample_rate: float = _opt(2.0, "float", "measurement rate per robot (Hz)")


@dataclass(frozen=True)
class ControllerSection:
    mode: str = _opt("adaptive", "str", "target source: estimated field or fixed uniform", MODES)
    dt: float = _opt(0.1, "float", "control / integration step (s)")
    k_max: int = _opt(10, "int", "highest cosine index per axis")
    eps_b: float = _opt(1e-9, "float", "steering norm below which a random heading is used")
    boundary: str = _opt("reflect", "str", "wall handling after an Euler overshoot", ("reflect", "clip"))


@dataclass(frozen=True)
class EstimatorSection:
    lattice: int = _opt(15, "int", "RBF centers per axis (g x g lattice)")
    sigma_rbf: float | None = _opt(None, "float", "RBF width (m); auto = 1.25 x lattice spacing")
    alpha: float = _opt(0.03, "float", "adaptation gain (1/s)")
    beta: float | None = _opt(None, "float", "forgetting rate (1/s); auto = 0.05 static, 0.3 moving")
    fusion: str = _opt("centralized", "str", "one shared estimator or one per robot", FUSIONS)
    floor: float = _opt(1e-3, "float", "density floor as a fraction of the mean clamped estimate")


@dataclass(frozen=True)
class RunSection:
    t_sim: float | None = _opt(None, "float", "horizon (s); auto = 120 static, 150 moving")
    seed: int = _opt(0, "int", "root seed for all random streams")
    metric_resolution: tuple = _opt((100, 100), "ipair", "grid for RMSE and field snapshots")
    density_resolution: tuple = _opt((128, 128), "ipair", "grid for the target density and its coefficients")
    output_dir: str = _opt("runs", "str", "where `run` writes its outputs")


SECTIONS = {
    "domain": DomainSection,
    "field": FieldSection,
    "robots": RobotsSection,
    "controller": ControllerSection,
    "estimator": EstimatorSection,
    "run": RunSection,
}

AUTO = {
    ("estimator", "sigma_rbf"): "1.25 x spacing",
    ("estimator", "beta"): "0.05 / 0.3",
    ("run", "t_sim"): "120 / 150",
}


@dataclass(frozen=True)
class ScenarioConfig:
    domain: DomainSection = dataclasses.field(default_factory=DomainSection)
    field: FieldSection = dataclasses.field(default_factory=FieldSection)
    robots: RobotsSection = dataclasses.field(default_factory=RobotsSection)
    controller: ControllerSection = dataclasses.field(default_factory=ControllerSection)
    estimator: EstimatorSection = dataclasses.field(default_factory=EstimatorSection)
    run: RunSection = dataclasses.field(default_factory=RunSection)

    @property
    def sample_period(self) -> float:
        return 1.0 / self.robots.sample_rate

    @property
    def sample_every(self) -> int:
        return int(round(self.sample_period / self.controller.dt))

    @property
    def n_steps(self) -> int:
        return int(self.run.t_sim / self.controller.dt + 1e-9)

    def build_domain(self) -> Domain:
        return Domain(self.domain.lower, self.domain.upper)

    def build_field(self) -> GroundTruthField:
        f = self.field
        if f.variant == MOVING:
            return GroundTruthField(
                self.build_domain(), f.amplitudes, f.sigmas, f.start_means, MOVING,
                end_means=f.end_means, t_sim=self.run.t_sim, gamma=f.gamma,
            )
        return GroundTruthField(self.build_domain(), f.amplitudes, f.sigmas, f.means, STATIC)

    def get(self, key: str):
        section, name = _split_key(key)
        return getattr(getattr(self, section), name)

    def replace(self, key: str, value) -> "ScenarioConfig":
        """Copy with one ``section.key`` changed (value as parsed text or typed)."""
        section, name = _split_key(key)
        if isinstance(value, str):
            value = _parse_value(section, name, value)
        sec = dataclasses.replace(getattr(self, section), **{name: value})
        return dataclasses.replace(self, **{section: sec})


def _split_key(key: str):
    try:
        section, name = key.split(".")
    except ValueError:
        raise ConfigError(f"{key}: expected 'section.key'") from None
    if section not in SECTIONS:
        raise ConfigError(f"{key}: unknown section {section!r}")
    if name not in {f.name for f in dataclasses.fields(SECTIONS[section])}:
        raise ConfigError(f"{key}: unknown key")
    return section, name


def _meta(section: str, name: str):
    for f in dataclasses.fields(SECTIONS[section]):
        if f.name == name:
            return f
    raise ConfigError(f"{section}.{name}: unknown key")


def _parse_value(section: str, name: str, text: str):
    f = _meta(section, name)
    kind, choices = f.metadata["kind"], f.metadata["choices"]
    path = f"{section}.{name}"
    text = text.strip()
    if text.lower() == "auto" and (section, name) in AUTO:
        return None
    try:
        if kind == "float":
            value = float(text)
        elif kind == "int":
            value = int(text)
        elif kind == "str":
            value = text
        elif kind in ("pair", "ipair"):
            cast = int if kind == "ipair" else float
            parts = [p for p in text.replace(",", " ").split()]
            if len(parts) != 2:
                raise ValueError("expected two numbers")
            value = tuple(cast(p) for p in parts)
        elif kind == "floats":
            value = tuple(float(p) for p in text.replace(",", " ").split())
        elif kind == "points":
            pts = []
            for chunk in text.split(";"):
                parts = chunk.replace(",", " ").split()
                if len(parts) != 2:
                    raise ValueError("points are 'x y' pairs separated by ';'")
                pts.append((float(parts[0]), float(parts[1])))
            value = tuple(pts)
        else:  # pragma: no cover
            raise AssertionError(kind)
    except ValueError as exc:
        raise ConfigError(f"{path}: cannot read {text!r} as {kind} ({exc})") from None
    if choices and value not in choices:
        raise ConfigError(f"{path}: {value!r} is not one of {', '.join(choices)}")
    return value


def _format_value(kind: str, value) -> str:
    if value is None:
        return "auto"
    if kind == "float":
        return repr(float(value))
    if kind in ("pair", "floats"):
        return ", ".join(repr(float(v)) for v in value)
    if kind == "ipair":
        return ", ".join(str(int(v)) for v in value)
    if kind == "points":
        return "; ".join(f"{float(x)!r} {float(y)!r}" for x, y in value)
    return str(value)


def resolve(cfg: ScenarioConfig) -> ScenarioConfig:
    """Fill ``auto`` keys and check cross-field invariants."""
    validate(cfg)
    moving = cfg.field.variant == MOVING
    est, run = cfg.estimator, cfg.run
    if est.beta is None:
        est = dataclasses.replace(est, beta=0.3 if moving else 0.05)
    if run.t_sim is None:
        run = dataclasses.replace(run, t_sim=150.0 if moving else 120.0)
    if est.sigma_rbf is None:
        spacing = float(min(cfg.build_domain().lengths)) / (est.lattice - 1)
        est = dataclasses.replace(est, sigma_rbf=1.25 * spacing)
    cfg = dataclasses.replace(cfg, estimator=est, run=run)
    validate(cfg)
    return cfg


def validate(cfg: ScenarioConfig) -> None:
    def need(ok, key, msg):
        if not ok:
            raise ConfigError(f"{key}: {msg}")

    try:
        domain = cfg.build_domain()
    except ConfigError as exc:
        raise ConfigError(f"domain: {exc}") from None
    f = cfg.field
    need(0.0 < f.gamma < 1.0, "field.gamma", "gamma must lie in (0,1)")
    need(f.noise_std >= 0, "field.noise_std", "must be non-negative")
    need(all(a > 0 for a in f.amplitudes), "field.amplitudes", "must be positive")
    need(all(s > 0 for s in f.sigmas), "field.sigmas", "must be positive")
    n = len(f.amplitudes)
    need(len(f.sigmas) == n, "field.sigmas", f"expected {n} entries")
    if f.variant == MOVING:
        need(len(f.start_means) == n, "field.start_means", f"expected {n} points")
        need(len(f.end_means) == n, "field.end_means", f"expected {n} points")
    else:
        need(len(f.means) == n, "field.means", f"expected {n} points")
    r = cfg.robots
    need(r.count >= 1, "robots.count", "need at least one robot")
    need(r.u_max > 0, "robots.u_max", "must be positive")
    need(r.sample_rate > 0, "robots.sample_rate", "must be positive")
    c = cfg.controller
    need(c.dt > 0, "controller.dt", "must be positive")
    need(c.k_max >= 1, "controller.k_max", "must be at least 1")
    need(c.eps_b > 0, "controller.eps_b", "must be positive")
    ratio = cfg.sample_period / c.dt
    need(ratio >= 1 - 1e-9 and abs(ratio - round(ratio)) <= 1e-9 * ratio, "robots.sample_rate",
         f"sample period {cfg.sample_period:g} s must be an integer multiple of controller.dt {c.dt:g} s")
    e = cfg.estimator
    need(e.lattice >= 2, "estimator.lattice", "need at least 2 centers per axis")
    need(e.sigma_rbf is None or e.sigma_rbf > 0, "estimator.sigma_rbf", "must be positive")
    need(e.alpha > 0, "estimator.alpha", "must be positive")
    need(e.beta is None or e.beta >= 0, "estimator.beta", "must be non-negative")
    need(e.floor >= 0, "estimator.floor", "must be non-negative")
    run = cfg.run
    need(run.t_sim is None or run.t_sim >= 0, "run.t_sim", "must be non-negative")
    need(min(run.metric_resolution) >= 2, "run.metric_resolution", "must be at least 2 x 2")
    need(min(run.density_resolution) >= 2, "run.density_resolution", "must be at least 2 x 2")
    del domain


def parse_config_text(text: str) -> ScenarioConfig:
    parser = configparser.ConfigParser(interpolation=None, empty_lines_in_values=False)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    sections = {}
    for name in parser.sections():
        if name not in SECTIONS:
            raise ConfigError(f"{name}: unknown section")
        known = {f.name for f in dataclasses.fields(SECTIONS[name])}
        values = {}
        for key, raw in parser.items(name):
            if key not in known:
                raise ConfigError(f"{name}.{key}: unknown key")
            values[key] = _parse_value(name, key, raw)
        sections[name] = SECTIONS[name](**values)
    return resolve(ScenarioConfig(**sections))


def parse_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"{path}: config file not found") from None
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc})") from None
    return parse_config_text(text)


def default_config(variant: str = STATIC) -> ScenarioConfig:
    return resolve(ScenarioConfig(field=FieldSection(variant=variant)))


def to_ini(cfg: ScenarioConfig) -> str:
    lines = []
    for name, cls in SECTIONS.items():
        lines.append(f"[{name}]")
        sec = getattr(cfg, name)
        for f in dataclasses.fields(cls):
            lines.append(f"{f.name} = {_format_value(f.metadata['kind'], getattr(sec, f.name))}")
        lines.append("")
    return "\n".join(lines)


def defaults_table() -> str:
    """Markdown table of every key and its default."""
    rows = ["| key | default | meaning |", "| --- | --- | --- |"]
    for name, cls in SECTIONS.items():
        for f in dataclasses.fields(cls):
            default = AUTO.get((name, f.name)) or _format_value(f.metadata["kind"], f.default)
            doc = f.metadata["doc"]
            if f.metadata["choices"]:
                doc += " (" + " \\| ".join(f.metadata["choices"]) + ")"
            rows.append(f"| `{name}.{f.name}` | `{default}` | {doc} |")
    return "\n".join(rows)
