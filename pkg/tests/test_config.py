import pytest

from sparse_prior.config import CONFIG_KEYS, ConfigError, load_config, resolve_config


class TestLoadConfig:
    def test_empty_file_is_empty_config(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("")
        assert load_config(path) == {}

    def test_whitespace_file_is_empty_config(self, tmp_path):
        path = tmp_path / "blank.json"
        path.write_text(" \n\t\n")
        assert load_config(path) == {}

    def test_reads_object(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text('{"trials": 5, "m_values": [40, 80]}')
        assert load_config(path) == {"trials": 5, "m_values": [40, 80]}

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read config file"):
            load_config(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(path)

    def test_non_object_top_level(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2, 3]")
        with pytest.raises(ConfigError, match="JSON object"):
            load_config(path)


class TestResolveConfig:
    def test_empty_gives_defaults(self):
        cfg = resolve_config({}, {})
        assert cfg.n == 240 and cfg.trials == 1000 and cfg.seed == 0

    def test_file_value_applied(self):
        cfg = resolve_config({"trials": 5, "seed": 3}, None)
        assert cfg.trials == 5 and cfg.seed == 3

    def test_overrides_beat_file(self):
        cfg = resolve_config({"seed": 3, "trials": 5}, {"seed": 11})
        assert cfg.seed == 11 and cfg.trials == 5

    def test_lists_coerced_to_tuples(self):
        cfg = resolve_config({"m_values": [60, 40], "algorithms": ["niht"]}, None)
        assert cfg.m_values == (60, 40)
        assert cfg.algorithms == ("niht",)

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="unknown configuration key 'trails'"):
            resolve_config({"trails": 5}, None)

    def test_unknown_key_lists_valid_ones(self):
        with pytest.raises(ConfigError, match="valid keys: .*noise_variance"):
            resolve_config(None, {"bogus": 1})

    def test_invalid_value_surfaces_field_message(self):
        with pytest.raises(ConfigError, match=r"c: must lie in \(0, 1\)"):
            resolve_config({"c": 1.5}, None)

    def test_wrong_type_wrapped(self):
        with pytest.raises(ConfigError):
            resolve_config({"trials": "many"}, None)

    def test_config_keys_cover_expected_fields(self):
        for key in ("n", "m", "trials", "seed", "algorithms", "sigma_values"):
            assert key in CONFIG_KEYS
