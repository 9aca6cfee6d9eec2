import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vanetsim.config import (PRESETS, ConfigError, ScenarioConfig, dump_config, load_config,
                             parse_config, preset, with_param)


def test_preset_scenario1():
    p = preset("scenario1")
    assert p.config.nodes == 300
    assert p.param == "connections" and p.values == [30, 50, 150, 300]
    assert p.config.pause == 0.0 and p.config.speed == 20.0 and p.config.queue_length == 50


def test_preset_scenario2():
    p = preset("scenario2")
    c = p.config
    assert (c.nodes, c.connections, c.speed, c.queue_length) == (200, 100, 10.0, 64)
    assert p.param == "pause" and p.values == [50.0, 100.0, 150.0, 200.0, 250.0]


def test_preset_scenario3():
    p = preset("scenario3")
    assert p.param == "speed" and p.values == [10.0, 30.0, 50.0, 70.0, 90.0]
    c = with_param(p.config, "speed", 70.0)
    assert c.speed_min == c.speed_max == 70.0


def test_presets_are_copies():
    preset("scenario2").config.nodes = 5
    assert PRESETS["scenario2"].config.nodes == 200


def test_validation_names_key():
    with pytest.raises(ConfigError, match="^range"):
        parse_config("protocol = AODV\nnodes = 10\nconnections = 2\nrange = -5\n")
    with pytest.raises(ConfigError, match="line 4"):
        parse_config("protocol = AODV\nnodes = 10\nconnections = 2\nrange = -5\n")
    with pytest.raises(ConfigError, match="^bogus"):
        parse_config("bogus = 1\n", ScenarioConfig())
    with pytest.raises(ConfigError, match="^nodes .line 1.: cannot parse"):
        parse_config("nodes = many\n", ScenarioConfig())
    with pytest.raises(ConfigError, match="missing"):
        parse_config("protocol = AODV\n")
    with pytest.raises(ConfigError, match="^connections"):
        ScenarioConfig(nodes=3, connections=7)
    with pytest.raises(ConfigError, match="^protocol"):
        ScenarioConfig(protocol="OLSR")
    with pytest.raises(ConfigError, match="^speed_min"):
        ScenarioConfig(speed_min=5, speed_max=1)


def test_comments_and_blank_lines():
    cfg = parse_config("# header\n\nprotocol = gpsr  # inline\nseed = 9\n", ScenarioConfig())
    assert cfg.protocol == "GPSR" and cfg.seed == 9


configs = st.builds(
    ScenarioConfig,
    protocol=st.sampled_from(["AODV", "DSR", "GPSR"]),
    nodes=st.integers(2, 400),
    connections=st.just(1),
    pause=st.floats(0, 500),
    speed_min=st.just(0.0),
    speed_max=st.floats(0, 100),
    sim_time=st.floats(1, 1000),
    planarization=st.sampled_from(["GG", "RNG"]),
    seed=st.integers(0, 2**31),
    trace=st.booleans(),
    out_dir=st.sampled_from(["", "runs", "a/b"]),
)


@given(configs)
@settings(max_examples=100)
def test_dump_load_roundtrip(cfg):
    text = dump_config(cfg)
    back = parse_config(text)
    assert back == cfg
    assert dump_config(back) == text


def test_load_config_from_file_and_preset(tmp_path):
    f = tmp_path / "x.cfg"
    f.write_text("protocol = DSR\nnodes = 20\nconnections = 4\n")
    cfg = load_config(f)
    assert (cfg.protocol, cfg.nodes, cfg.connections) == ("DSR", 20, 4)
    assert cfg.sim_time == 600.0
    assert load_config("scenario2").queue_length == 64
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")


def test_with_param_rejects_unknown():
    with pytest.raises(ConfigError):
        with_param(ScenarioConfig(), "colour", 3)
