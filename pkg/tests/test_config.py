import pytest

from wooley.config import AppConfig, SearchSettings, apply_env, config_from_dict, load_config
from wooley.decider import DEFAULT_NODE_BUDGET, SearchMode


def test_defaults():
    config = AppConfig()
    assert config.search.node_budget == DEFAULT_NODE_BUDGET == 10**8
    assert config.search.mode == "complete"
    assert config.output.json is False
    cfg = config.search_config()
    assert cfg.mode is SearchMode.COMPLETE
    assert cfg.max_factors_override is None
    assert cfg.seed == 0


def test_load_toml(tmp_path):
    path = tmp_path / "config.toml"
    path.write_text(
        '[search]\nnode_budget = 5000\nmode = "heuristic"\nmax_factors = 3\n\n[output]\nmax_exp = 6\n',
        encoding="utf-8",
    )
    config = load_config(path)
    assert config.search.node_budget == 5000
    assert config.search.mode == "heuristic"
    assert config.output.max_exp == 6
    # untouched sections keep their defaults
    assert config.survey.probe_budget == 200_000
    cfg = config.search_config()
    assert cfg.mode is SearchMode.HEURISTIC
    assert cfg.max_factors_override == 3


def test_load_yaml(tmp_path):
    pytest.importorskip("yaml")
    path = tmp_path / "config.yaml"
    path.write_text("search:\n  seed: 42\nsurvey:\n  workers: 2\n", encoding="utf-8")
    config = load_config(path)
    assert config.search.seed == 42
    assert config.survey.workers == 2


def test_load_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "missing.toml")
    path = tmp_path / "config.ini"
    path.write_text("[search]\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_config(path)


@pytest.mark.parametrize("raw", [{"search": {"node_budget": 0}}, {"search": {"mode": "fast"}}])
def test_invalid_values(raw):
    with pytest.raises(ValueError):
        config_from_dict(raw)


def test_search_settings_validation():
    with pytest.raises(ValueError):
        SearchSettings(max_factors=-1)


def test_apply_env():
    config = AppConfig()
    assert apply_env(config, {"WOOLEY_BUDGET": "123"}).search.node_budget == 123
    assert apply_env(config, {}) == config
    assert apply_env(config, {"WOOLEY_BUDGET": " "}) == config
    with pytest.raises(ValueError):
        apply_env(config, {"WOOLEY_BUDGET": "lots"})
    with pytest.raises(ValueError):
        apply_env(config, {"WOOLEY_BUDGET": "-5"})
