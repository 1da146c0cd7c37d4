import json

import pytest
import yaml

from multistat.utils.config import load_config


def test_defaults():
    config = load_config()
    assert config.sampling.threads == 1
    assert config.output.digits == 6
    assert config.solver.pair_width == "1e-30"
    assert config.stability.eliminate == ["x1", "x7", "x11"]
    assert config.region.window["k19"] == [0.0, 1000.0]
    assert config.cache.enabled
    assert config.reduction.pivot_order == "laws-last"


def test_yaml_overrides_merge_with_defaults(tmp_path):
    path = tmp_path / "multistat.yaml"
    path.write_text(yaml.safe_dump({"sampling": {"threads": 4}, "region": {"raster_columns": 12}}))
    config = load_config(str(path))
    assert config.sampling.threads == 4
    assert config.sampling.chunk_size == 8
    assert config.region.raster_columns == 12
    assert config.region.base_axis == "k17"


def test_json_overrides(tmp_path):
    path = tmp_path / "multistat.json"
    path.write_text(json.dumps({"output": {"digits": 12}, "seed": 7}))
    config = load_config(str(path))
    assert config.output.digits == 12
    assert config.seed == 7


def test_empty_yaml(tmp_path):
    path = tmp_path / "empty.yml"
    path.write_text("")
    assert load_config(str(path)).log_level == "INFO"


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(str(tmp_path / "nope.yaml"))


def test_unsupported_format(tmp_path):
    path = tmp_path / "multistat.toml"
    path.write_text("")
    with pytest.raises(ValueError, match="Unsupported config file format"):
        load_config(str(path))


@pytest.mark.parametrize("override", [
    {"sampling": {"threads": 0}},
    {"output": {"digits": 0}},
    {"solver": {"pair_width": "0"}},
    {"reduction": {"pivot_order": "random"}},
])
def test_invalid_values(tmp_path, override):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(override))
    with pytest.raises(ValueError):
        load_config(str(path))


def test_pair_width_is_exact():
    config = load_config()
    assert config.solver.pair_width_value.denominator == 10 ** 30
