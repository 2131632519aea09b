from pathlib import Path

import pytest

from ergocover.config import (
    ScenarioConfig,
    default_config,
    defaults_table,
    parse_config,
    parse_config_text,
    resolve,
    to_ini,
)
from ergocover.domain import MOVING, STATIC
from ergocover.errors import ConfigError

README = Path(__file__).resolve().parents[1] / "README.md"


def test_empty_file_gives_defaults():
    cfg = parse_config_text("")
    assert cfg == default_config(STATIC)
    assert cfg.domain.lower == (0.0, 0.0) and cfg.domain.upper == (1.0, 1.0)
    assert cfg.robots.count == 4
    assert cfg.robots.u_max == 1.0
    assert cfg.robots.sample_rate == 2.0
    assert cfg.controller.dt == 0.1
    assert cfg.run.metric_resolution == (100, 100)
    assert cfg.run.t_sim == 120.0
    assert cfg.sample_every == 5


def test_auto_values_follow_variant():
    cfg = parse_config_text("[field]\nvariant = moving-gaussian-mixture\n")
    assert cfg.run.t_sim == 150.0
    assert cfg.estimator.beta == 0.3
    assert default_config(STATIC).estimator.beta == 0.05


def test_auto_rbf_width_tracks_lattice():
    cfg = parse_config_text("[estimator]\nlattice = 5\n")
    assert cfg.estimator.sigma_rbf == pytest.approx(1.25 * 0.25)


def test_gamma_out_of_range_rejected():
    text = "[field]\nvariant = moving-gaussian-mixture\ngamma = 1.5\n"
    with pytest.raises(ConfigError, match=r"field\.gamma: gamma must lie in \(0,1\)"):
        parse_config_text(text)


@pytest.mark.parametrize("variant", [STATIC, MOVING])
def test_round_trip(variant):
    cfg = default_config(variant).replace("run.seed", 17).replace("field.noise_std", "0.05")
    assert parse_config_text(to_ini(cfg)) == cfg


def test_round_trip_of_edited_values():
    text = (
        "[domain]\nlower = -1.5, 2\nupper = 3.25 4\n"
        "[field]\namplitudes = 1 0.5 2\nsigmas = 0.3 0.2 0.25\nmeans = 0 3; 1 3.5; 2.5 2.5\n"
        "[run]\nt_sim = 2.5\n"
    )
    cfg = parse_config_text(text)
    assert cfg.field.means == ((0.0, 3.0), (1.0, 3.5), (2.5, 2.5))
    assert parse_config_text(to_ini(cfg)) == cfg


@pytest.mark.parametrize(
    "text, key",
    [
        ("[robots]\nspeed = 2\n", "robots.speed"),
        ("[sensors]\nrate = 2\n", "sensors"),
        ("[robots]\ncount = four\n", "robots.count"),
        ("[controller]\nmode = greedy\n", "controller.mode"),
        ("[robots]\nsample_rate = 3\n", "robots.sample_rate"),
        ("[robots]\ncount = 0\n", "robots.count"),
        ("[field]\nsigmas = 0.1\n", "field.sigmas"),
    ],
)
def test_bad_values_name_their_key(text, key):
    with pytest.raises(ConfigError, match=key.replace(".", r"\.")):
        parse_config_text(text)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        parse_config(tmp_path / "absent.ini")


def test_replace_and_get():
    cfg = default_config().replace("estimator.alpha", "0.5")
    assert cfg.get("estimator.alpha") == 0.5
    with pytest.raises(ConfigError):
        cfg.replace("estimator.nonsense", "1")


def test_resolve_is_idempotent():
    cfg = default_config()
    assert resolve(cfg) == cfg
    assert resolve(ScenarioConfig()) == cfg


def test_readme_defaults_table_matches_code():
    assert defaults_table() in README.read_text(encoding="utf-8")
