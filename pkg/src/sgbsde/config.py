"""Experiment configuration: a flat sectioned key-value text format.

Example::

    [model]
    name = quadratic
    dim = 5
    a = 1.0

    [grid]
    horizon = 1.0
    steps = 10

    [space]
    family = prewavelet
    level = 3
    r = 2.0

    [algo]
    method = direct
    M = 2000

    [schedule]
    kind = empirical

    [schedule.y]
    alpha = 1.0
    beta1 = 0.0
    beta0 = 1.0
    m0 = 100.0

    (same for schedule.z0 and schedule.zn; ``[schedule.zn p=3]`` overrides a
    group from Picard iteration 3 on)

    [picard]
    beta_k = auto
    warm_start = on
    scaling = raw

    [init]
    y = 0.5
    z0 = -0.2
    zn = 0.0

    [seeds]
    seed = 0
    runs = 1
"""
from __future__ import annotations

import configparser
import io
import re
from dataclasses import dataclass, fields, replace
from typing import Optional

from .models import MODELS
from .sgd import GROUPS, EmpiricalSchedule, GroupRate, PicardConfig, PowerLaw, Schedule
from .sparse_grid import Family

_OVERRIDE = re.compile(r"^schedule\.(y|z0|zn) p=(\d+)$")
_KNOWN = {"model", "grid", "space", "algo", "schedule", "picard", "init", "seeds"} | {
    f"schedule.{g}" for g in GROUPS
}


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class ExperimentConfig:
    model: str
    dim: int
    horizon: float
    steps: int
    family: str
    level: int
    r: float
    method: str
    M: int
    schedule: Schedule
    P: int = 1
    model_params: tuple = ()  # sorted (name, value) pairs
    overrides: tuple = ()  # sorted (p, schedule) pairs, p >= 2
    beta_k: Optional[float] = None
    warm_start: bool = True
    scaling: str = "raw"
    decay: float = 1.0
    init_noise: float = 0.0
    init_y: float = 0.0
    init_z0: float = 0.0
    init_zn: float = 0.0
    seed: int = 0
    runs: int = 1
    euler_strict: bool = False
    name: str = ""

    def __post_init__(self):
        validate(self)

    @property
    def params(self) -> dict:
        return dict(self.model_params)

    def picard_config(self) -> PicardConfig:
        return PicardConfig(
            P=self.P, M=self.M, beta_k=self.beta_k, warm_start=self.warm_start,
            scaling=self.scaling, overrides=dict(self.overrides), decay=self.decay,
            init_noise=self.init_noise,
        )

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)


def validate(cfg: ExperimentConfig) -> None:
    if cfg.model not in MODELS:
        raise ConfigError("model.name", f"unknown model {cfg.model!r}; valid names: {', '.join(MODELS)}")
    if cfg.dim < 1:
        raise ConfigError("model.dim", "must be a positive integer")
    if cfg.horizon <= 0:
        raise ConfigError("grid.horizon", "must be positive")
    if cfg.steps < 1:
        raise ConfigError("grid.steps", "must be a positive integer")
    try:
        Family.parse(cfg.family)
    except ValueError as exc:
        raise ConfigError("space.family", str(exc)) from None
    if cfg.level < 1:
        raise ConfigError("space.level", "must be a positive integer")
    if cfg.r <= 0:
        raise ConfigError("space.r", "must be positive")
    if cfg.method not in ("direct", "picard"):
        raise ConfigError("algo.method", "must be 'direct' or 'picard'")
    if cfg.M < 0:
        raise ConfigError("algo.M", "must be non-negative")
    if cfg.P < 1:
        raise ConfigError("algo.P", "must be at least 1")
    if cfg.beta_k is not None and cfg.beta_k < 1:
        raise ConfigError("picard.beta_k", "must be at least 1 (or 'auto')")
    if cfg.scaling not in ("normalized", "raw"):
        raise ConfigError("picard.scaling", "must be 'normalized' or 'raw'")
    if cfg.runs < 1:
        raise ConfigError("seeds.runs", "must be at least 1")
    for p, _ in cfg.overrides:
        if p < 2:
            raise ConfigError(f"schedule p={p}", "overrides start at iteration 2")


# ---------------------------------------------------------------------------
# text form


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "on" if v else "off"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _rate_items(rate: GroupRate) -> dict:
    return {"alpha": _fmt(float(rate.alpha)), "beta1": _fmt(float(rate.beta1)),
            "beta0": _fmt(float(rate.beta0)), "m0": _fmt(float(rate.m0))}


def emit(cfg: ExperimentConfig) -> str:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp["model"] = {"name": cfg.model, "dim": str(cfg.dim), **{k: _fmt(float(v)) for k, v in cfg.model_params}}
    if cfg.name:
        cp["model"]["preset"] = cfg.name
    cp["grid"] = {"horizon": _fmt(float(cfg.horizon)), "steps": str(cfg.steps)}
    cp["space"] = {"family": Family.parse(cfg.family).value, "level": str(cfg.level), "r": _fmt(float(cfg.r))}
    cp["algo"] = {"method": cfg.method, "M": str(cfg.M), "P": str(cfg.P), "euler_strict": _fmt(cfg.euler_strict)}
    sched = cfg.schedule
    if isinstance(sched, PowerLaw):
        cp["schedule"] = {"kind": "powerlaw", "gamma": _fmt(float(sched.gamma)),
                          "rho": _fmt(float(sched.rho)), "theory": _fmt(sched.theory)}
    else:
        cp["schedule"] = {"kind": "empirical"}
        for g in GROUPS:
            cp[f"schedule.{g}"] = _rate_items(sched.group(g))
    for p, over in cfg.overrides:
        if isinstance(over, PowerLaw):
            raise ConfigError(f"schedule p={p}", "overrides need an empirical schedule")
        for g in GROUPS:
            cp[f"schedule.{g} p={p}"] = _rate_items(over.group(g))
    cp["picard"] = {
        "beta_k": "auto" if cfg.beta_k is None else _fmt(float(cfg.beta_k)),
        "warm_start": _fmt(cfg.warm_start), "scaling": cfg.scaling,
        "decay": _fmt(float(cfg.decay)), "init_noise": _fmt(float(cfg.init_noise)),
    }
    cp["init"] = {"y": _fmt(float(cfg.init_y)), "z0": _fmt(float(cfg.init_z0)), "zn": _fmt(float(cfg.init_zn))}
    cp["seeds"] = {"seed": str(cfg.seed), "runs": str(cfg.runs)}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


class _Reader:
    def __init__(self, cp: configparser.ConfigParser):
        self.cp = cp

    def raw(self, section, key, default=None):
        if section not in self.cp or key not in self.cp[section]:
            if default is None:
                raise ConfigError(f"{section}.{key}", "missing")
            return default
        return self.cp[section][key]

    def num(self, section, key, kind=float, default=None):
        text = self.raw(section, key, None if default is None else str(default))
        try:
            return kind(text)
        except ValueError:
            raise ConfigError(f"{section}.{key}", f"expected {kind.__name__}, got {text!r}") from None

    def flag(self, section, key, default):
        text = self.raw(section, key, "on" if default else "off").strip().lower()
        if text in ("on", "true", "yes", "1"):
            return True
        if text in ("off", "false", "no", "0"):
            return False
        raise ConfigError(f"{section}.{key}", f"expected on/off, got {text!r}")

    def family(self) -> str:
        try:
            return Family.parse(self.raw("space", "family", "prewavelet")).value
        except ValueError as exc:
            raise ConfigError("space.family", str(exc)) from None

    def rate(self, section) -> GroupRate:
        try:
            return GroupRate(*(self.num(section, k) for k in ("alpha", "beta1", "beta0", "m0")))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(section, str(exc)) from None


def parse(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("<file>", str(exc).splitlines()[0]) from None
    for sec in cp.sections():
        if sec not in _KNOWN and not _OVERRIDE.match(sec):
            raise ConfigError(sec, "unknown section")
    rd = _Reader(cp)
    name = rd.raw("model", "name").strip()
    if name not in MODELS:
        raise ConfigError("model.name", f"unknown model {name!r}; valid names: {', '.join(MODELS)}")
    params = tuple(sorted(
        (k, rd.num("model", k)) for k in cp["model"] if k not in ("name", "dim", "preset")
    )) if "model" in cp else ()
    kind = rd.raw("schedule", "kind", "empirical").strip().lower()
    if kind == "powerlaw":
        try:
            schedule = PowerLaw(rd.num("schedule", "gamma"), rd.num("schedule", "rho"), rd.flag("schedule", "theory", False))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError("schedule", str(exc)) from None
    elif kind == "empirical":
        schedule = EmpiricalSchedule(*(rd.rate(f"schedule.{g}") for g in GROUPS))
    else:
        raise ConfigError("schedule.kind", "must be 'empirical' or 'powerlaw'")
    over_groups: dict[int, dict] = {}
    for sec in cp.sections():
        m = _OVERRIDE.match(sec)
        if m:
            over_groups.setdefault(int(m.group(2)), {})[m.group(1)] = rd.rate(sec)
    overrides = []
    current = schedule
    for p in sorted(over_groups):
        if not isinstance(schedule, EmpiricalSchedule):
            raise ConfigError(f"schedule p={p}", "overrides need an empirical schedule")
        # groups not overridden at p keep the rates in force before p
        current = EmpiricalSchedule(**{g: over_groups[p].get(g, current.group(g)) for g in GROUPS})
        overrides.append((p, current))
    beta_text = rd.raw("picard", "beta_k", "auto").strip().lower()
    beta_k = None if beta_text == "auto" else rd.num("picard", "beta_k")
    return ExperimentConfig(
        model=name,
        dim=rd.num("model", "dim", int),
        model_params=params,
        horizon=rd.num("grid", "horizon"),
        steps=rd.num("grid", "steps", int),
        family=rd.family(),
        level=rd.num("space", "level", int, 3),
        r=rd.num("space", "r", float, 2.0),
        method=rd.raw("algo", "method").strip().lower(),
        M=rd.num("algo", "M", int),
        P=rd.num("algo", "P", int, 1),
        euler_strict=rd.flag("algo", "euler_strict", False),
        schedule=schedule,
        overrides=tuple(overrides),
        beta_k=beta_k,
        warm_start=rd.flag("picard", "warm_start", True),
        scaling=rd.raw("picard", "scaling", "raw").strip().lower(),
        decay=rd.num("picard", "decay", float, 1.0),
        init_noise=rd.num("picard", "init_noise", float, 0.0),
        init_y=rd.num("init", "y", float, 0.0),
        init_z0=rd.num("init", "z0", float, 0.0),
        init_zn=rd.num("init", "zn", float, 0.0),
        seed=rd.num("seeds", "seed", int, 0),
        runs=rd.num("seeds", "runs", int, 1),
        name=rd.raw("model", "preset", "").strip() if "model" in cp else "",
    )


def load(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse(fh.read())


def config_dict(cfg: ExperimentConfig) -> dict:
    """Plain field dictionary, used as the config echo in reports."""
    return {f.name: getattr(cfg, f.name) for f in fields(cfg)}
