import pytest

from sgbsde.config import ConfigError, emit, load, parse
from sgbsde.presets import PRESETS, get_preset
from sgbsde.sgd import EmpiricalSchedule, GroupRate, PowerLaw

MINIMAL = """
[model]
name = quadratic
dim = 2
a = 1.0

[grid]
horizon = 1.0
steps = 4

[space]
family = modhat
level = 2

[algo]
method = direct
M = 100

[schedule.y]
alpha = 1
beta1 = 0
beta0 = 1
m0 = 100

[schedule.z0]
alpha = 0.8
beta1 = 0
beta0 = 1
m0 = 100

[schedule.zn]
alpha = 0.86
beta1 = 0.02
beta0 = 0.05
m0 = 100
"""


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_round_trip(name):
    cfg = get_preset(name)
    assert parse(emit(cfg)) == cfg


def test_minimal_config_defaults():
    cfg = parse(MINIMAL)
    assert cfg.params == {"a": 1.0}
    assert (cfg.P, cfg.seed, cfg.runs, cfg.beta_k, cfg.warm_start, cfg.scaling) == (1, 0, 1, None, True, "raw")
    assert cfg.schedule.zn == GroupRate(0.86, 0.02, 0.05, 100)
    assert parse(emit(cfg)) == cfg


def test_powerlaw_schedule_round_trip():
    cfg = parse(MINIMAL).with_(schedule=PowerLaw(1.0, 0.75, theory=True), method="picard", beta_k=3.0)
    back = parse(emit(cfg))
    assert back == cfg
    assert back.picard_config().beta_k == 3.0


def test_override_sections_inherit_missing_groups():
    text = MINIMAL.replace("method = direct", "method = picard\nP = 3") + """
[schedule.y p=2]
alpha = 1
beta1 = 0
beta0 = 0.3
m0 = 100

[schedule.zn p=3]
alpha = 0.84
beta1 = 0.01
beta0 = 0.02
m0 = 100
"""
    cfg = parse(text)
    (p2, s2), (p3, s3) = cfg.overrides
    assert (p2, p3) == (2, 3)
    assert s2.y.beta0 == 0.3 and s2.z0 == cfg.schedule.z0
    assert s3.y.beta0 == 0.3 and s3.zn.beta0 == 0.02
    pc = cfg.picard_config()
    assert pc.schedule_for(cfg.schedule, 1) == cfg.schedule
    assert pc.schedule_for(cfg.schedule, 3) == s3


def test_preset_fields_follow_tables():
    cfg = get_preset("quadratic-d5-prewavelet")
    assert (cfg.dim, cfg.steps, cfg.horizon, cfg.M, cfg.level, cfg.family) == (5, 10, 1.0, 2000, 3, "prewavelet")
    assert cfg.schedule.y == GroupRate(1, 0, 1, 100)
    assert (cfg.init_y, cfg.init_z0) == (0.5, -0.2)
    periodic = get_preset("periodic-d3-picard")
    assert (periodic.P, periodic.M, periodic.steps, periodic.horizon, periodic.level) == (5, 100_000, 10, 0.3, 3)
    assert isinstance(periodic.schedule, EmpiricalSchedule)


@pytest.mark.parametrize(
    "edit,path",
    [
        (("name = quadratic", "name = heston"), "model.name"),
        (("dim = 2", "dim = 0"), "model.dim"),
        (("steps = 4", "steps = two"), "grid.steps"),
        (("family = modhat", "family = spline"), "space.family"),
        (("method = direct", "method = newton"), "algo.method"),
        (("alpha = 0.8", "alpha = 1.8"), "schedule.z0"),
        (("[schedule.zn]", "[schedule.zx]"), "schedule.zx"),
    ],
)
def test_validation_names_field_path(edit, path):
    with pytest.raises(ConfigError) as err:
        parse(MINIMAL.replace(*edit))
    assert str(err.value).startswith(path)


def test_unknown_model_lists_valid_names():
    with pytest.raises(ConfigError, match="periodic, quadratic, financial, challenging, bifurcation"):
        parse(MINIMAL.replace("name = quadratic", "name = heston"))


def test_missing_required_key():
    with pytest.raises(ConfigError, match="algo.M"):
        parse(MINIMAL.replace("M = 100\n", ""))


def test_override_at_first_iteration_rejected():
    text = MINIMAL + "\n[schedule.y p=1]\nalpha = 1\nbeta1 = 0\nbeta0 = 1\nm0 = 0\n"
    with pytest.raises(ConfigError):
        parse(text)


def test_load_from_file(tmp_path):
    target = tmp_path / "exp.ini"
    target.write_text(emit(get_preset("financial-d2-prewavelet")))
    assert load(target) == get_preset("financial-d2-prewavelet")


def test_unknown_preset():
    with pytest.raises(KeyError, match="periodic-d3-picard"):
        get_preset("nope")
