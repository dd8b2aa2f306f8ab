"""Shipped experiment presets, transcribed from the published parameter tables.

Rate tuples are ``(alpha, beta1, beta0, m0)`` for the groups ``y``,
``z0`` and ``zn``. Values the tables leave open (for example the number of
time steps of the bifurcation runs) are marked below.
"""
from __future__ import annotations

from .config import ExperimentConfig
from .sgd import EmpiricalSchedule, GroupRate


def _sched(y, z0, zn) -> EmpiricalSchedule:
    return EmpiricalSchedule(GroupRate(*y), GroupRate(*z0), GroupRate(*zn))


def _periodic():
    z = lambda b0, m0: (0.6, 0, b0, m0)
    return {
        "periodic-d3-picard": ExperimentConfig(
            model="periodic", dim=3, horizon=0.3, steps=10, family="prewavelet", level=3, r=2.0,
            method="picard", M=100_000, P=5,
            schedule=_sched((0.6, 0, 3, 15000), z(20, 10000), z(20, 10000)),
            overrides=(
                (2, _sched((0.6, 0, 2, 8000), z(10, 8000), z(10, 8000))),
                (3, _sched((0.6, 0, 1, 8000), z(5, 8000), z(5, 8000))),
                (4, _sched((0.6, 0, 0.5, 8000), z(3, 8000), z(3, 8000))),
            ),
        ),
    }


def _quadratic():
    return {
        "quadratic-d5-prewavelet": ExperimentConfig(
            model="quadratic", dim=5, model_params=(("a", 1.0),), horizon=1.0, steps=10,
            family="prewavelet", level=3, r=2.0, method="direct", M=2000,
            schedule=_sched((1, 0, 1, 100), (0.8, 0, 1, 100), (0.86, 0.02, 0.05, 100)),
            init_y=0.5, init_z0=-0.2,
        ),
        "quadratic-d5-prewavelet-picard": ExperimentConfig(
            model="quadratic", dim=5, model_params=(("a", 1.0),), horizon=1.0, steps=10,
            family="prewavelet", level=3, r=2.0, method="picard", M=2000, P=6,
            schedule=_sched((1, 0, 0.8, 100), (0.9, 0, 1, 100), (0.84, 0.02, 0.05, 100)),
            overrides=(
                (2, _sched((1, 0, 0.3, 100), (0.9, 0, 0.4, 100), (0.84, 0.01, 0.02, 100))),
                (3, _sched((1, 0, 0.2, 100), (0.9, 0, 0.2, 100), (0.84, 0.005, 0.01, 100))),
            ),
            init_y=0.5, init_z0=-0.2,
        ),
        "quadratic-d100-hat": ExperimentConfig(
            model="quadratic", dim=100, model_params=(("a", 1.0),), horizon=1.0, steps=10,
            family="modhat", level=3, r=3.2, method="direct", M=2000,
            schedule=_sched((0.9, 0, 1, 100), (0.7, 0, 1, 100), (1, 0.003, 0.01, 1000)),
            init_y=5.5,
        ),
        "quadratic-d25-hat-picard": ExperimentConfig(
            model="quadratic", dim=25, model_params=(("a", 1.0),), horizon=1.0, steps=10,
            family="modhat", level=3, r=2.8, method="picard", M=1500, P=3,
            schedule=_sched((0.9, 0, 0.5, 100), (0.8, 0, 0.8, 100), (1, 0.003, 0.01, 1000)),
            init_y=2.0, init_z0=0.1,
        ),
    }


def _financial():
    out = {}

    def direct(name, d, family, r, y, M, rates, runs=10):
        out[name] = ExperimentConfig(
            model="financial", dim=d, horizon=0.5, steps=10, family=family, level=3, r=r,
            method="direct", M=M, schedule=_sched(*rates), init_y=y, runs=runs,
        )

    direct("financial-d2-prewavelet", 2, "prewavelet", 2.0, 2.0, 6000,
           ((1, 0, 1.5, 1000), (1, 0, 20, 1000), (1, 0.003, 0.01, 1000)))
    direct("financial-d4-prewavelet", 4, "prewavelet", 2.0, 5.0, 6000,
           ((1, 0, 1, 1000), (1, 0, 20, 1000), (1, 0.001, 0.01, 1000)))
    for d, r, y, a, m0 in [(5, 2.0, 5.0, 0.95, 100), (10, 2.5, 8.0, 0.9, 300), (15, 2.5, 8.0, 0.85, 500),
                           (20, 2.5, 8.0, 0.8, 1000), (25, 2.8, 8.0, 0.7, 1500)]:
        b0 = {5: 0.3, 10: 0.35, 15: 0.3, 20: 0.2, 25: 0.2}[d]
        direct(f"financial-d{d}-hat", d, "modhat", r, y, 5000,
               ((a, 0, b0, m0), (1, 0, 5, m0), (1, 0.001, 0.01, m0)))
    out["financial-d4-prewavelet-picard"] = ExperimentConfig(
        model="financial", dim=4, horizon=0.5, steps=10, family="prewavelet", level=3, r=2.0,
        method="picard", M=6000, P=9,
        schedule=_sched((1, 0, 1, 1000), (1, 0, 20, 1000), (1, 0.001, 0.01, 1000)),
        overrides=(
            (2, _sched((1, 0, 0.3, 1000), (1, 0, 5, 1000), (1, 0.0005, 0.005, 1000))),
            (3, _sched((1, 0, 0.2, 1000), (1, 0, 5, 1000), (1, 0.0003, 0.003, 1000))),
            (4, _sched((1, 0, 0.15, 1000), (1, 0, 3, 1000), (1, 0.0002, 0.002, 1000))),
            (6, _sched((1, 0, 0.1, 1000), (1, 0, 2, 1000), (1, 0.0001, 0.001, 1000))),
        ),
        init_y=5.0, init_z0=0.1, init_zn=-0.01,
    )
    out["financial-d20-hat-picard"] = ExperimentConfig(
        model="financial", dim=20, horizon=0.5, steps=10, family="modhat", level=3, r=2.5,
        method="picard", M=5000, P=4,
        schedule=_sched((0.9, 0, 0.6, 1000), (1, 0, 5, 1000), (1, 0.001, 0.01, 1000)),
        overrides=(
            (2, _sched((0.9, 0, 0.2, 1000), (1, 0, 4, 1000), (1, 0.001, 0.01, 1000))),
            (3, _sched((0.9, 0, 0.15, 1000), (1, 0, 3, 1000), (1, 0.0005, 0.005, 1000))),
            (4, _sched((0.9, 0, 0.1, 1000), (1, 0, 2, 1000), (1, 0.0005, 0.005, 1000))),
        ),
        init_y=8.0,
    )
    return out


# challenging example: d -> (N, r, y, z0, zn, rates); M = 10000 as published for this example
_CHALLENGING_DIRECT = {
    1: (10, 2.0, 0.5, 0.0, 0.0, ((1, 0, 0.5, 100), (1, 0, 3, 100), (1, 0.1, 0.1, 100))),
    2: (20, 2.0, 0.1, 0.0, 0.0, ((1, 0, 0.5, 100), (1, 0, 5, 100), (1, 0.2, 0.5, 100))),
    5: (40, 2.0, 0.4, -1.0, 0.0, ((1, 0, 0.5, 300), (0.95, 0, 5, 500), (1, 0.2, 0.1, 500))),
    8: (60, 2.2, 0.6, 1.0, 0.08, ((1, 0, 0.35, 500), (1, 0, 5, 500), (1, 0.2, 1, 500))),
    10: (100, 2.5, 0.1, -1.0, -0.1, ((1, 0, 0.35, 500), (0.95, 0, 5, 500), (1, 0.2, 1, 500))),
}
_CHALLENGING_PICARD = {
    1: (10, 2.0, 0.5, 0.0, 0.0, ((1, 0, 0.5, 100), (1, 0, 3, 100), (1, 0.1, 0.1, 100))),
    2: (20, 2.0, 0.1, 0.0, 0.0, ((1, 0, 0.5, 100), (1, 0, 5, 100), (1, 0.2, 0.5, 100))),
    5: (40, 2.0, 0.4, -2.0, 0.0, ((1, 0, 0.5, 300), (0.95, 0, 5, 500), (1, 0.2, 0.1, 500))),
    8: (60, 2.2, 0.6, 1.0, 0.08, ((1, 0, 0.35, 500), (1, 0, 5, 500), (1, 0.2, 1, 500))),
}


def _challenging():
    out = {}
    for d, (N, r, y, z0, zn, rates) in _CHALLENGING_DIRECT.items():
        out[f"challenging-d{d}-hat"] = ExperimentConfig(
            model="challenging", dim=d, horizon=1.0, steps=N, family="modhat", level=3, r=r,
            method="direct", M=10_000, schedule=_sched(*rates), init_y=y, init_z0=z0, init_zn=zn,
        )
    for d, (N, r, y, z0, zn, rates) in _CHALLENGING_PICARD.items():
        out[f"challenging-d{d}-hat-picard"] = ExperimentConfig(
            model="challenging", dim=d, horizon=1.0, steps=N, family="modhat", level=3, r=r,
            method="picard", M=10_000, P=5, decay=0.8,
            schedule=_sched(*rates), init_y=y, init_z0=z0, init_zn=zn,
        )
    out["challenging-d10-hat-picard"] = ExperimentConfig(
        model="challenging", dim=10, horizon=1.0, steps=100, family="modhat", level=3, r=2.5,
        method="picard", M=10_000, P=8,
        schedule=_sched((1, 0, 0.25, 500), (0.95, 0, 4, 500), (1, 0.15, 0.5, 500)),
        overrides=(
            (2, _sched((1, 0, 0.2, 500), (0.95, 0, 3, 500), (1, 0.12, 0.4, 500))),
            (3, _sched((1, 0, 0.15, 500), (0.95, 0, 2, 500), (1, 0.1, 0.3, 500))),
            (4, _sched((1, 0, 0.1, 500), (0.95, 0, 1, 500), (1, 0.08, 0.25, 500))),
            (6, _sched((1, 0, 0.05, 500), (0.95, 0, 0.5, 500), (1, 0.05, 0.2, 500))),
        ),
        init_y=0.1, init_z0=-1.0, init_zn=-0.1,
    )
    return out


def _bifurcation():
    # the tables give no N for these runs; 10 steps as in the other T = 1 examples
    common = dict(model="bifurcation", dim=2, horizon=1.0, steps=10, family="prewavelet",
                  level=3, r=2.0, method="picard", M=5000, P=9)
    return {
        "bifurcation-a0.4-picard": ExperimentConfig(
            model_params=(("a", -0.4),), init_y=0.3,
            schedule=_sched((1, 0, 1, 300), (1, 0, 1, 300), (1, 0.6, 0.1, 300)), **common,
        ),
        "bifurcation-a1.5-picard": ExperimentConfig(
            model_params=(("a", -1.5),), init_y=0.0,
            schedule=_sched((1, 0, 2, 300), (1, 0, 1, 300), (1, 0.6, 0.1, 300)), **common,
        ),
    }


def _build():
    out = {}
    for part in (_periodic, _quadratic, _financial, _challenging, _bifurcation):
        out.update(part())
    return {name: cfg.with_(name=name) for name, cfg in sorted(out.items())}


PRESETS = _build()


def get_preset(name: str) -> ExperimentConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None
