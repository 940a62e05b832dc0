import pytest
from hypothesis import given
from hypothesis import strategies as st

from p2pvirus.errors import ConfigError
from p2pvirus.scenario import ScenarioConfig, ScenarioParseError, parse_scenario, serialize_scenario


def test_defaults_fill_optional_keys():
    cfg = parse_scenario("# comment\nn = 50\nvirus = Magic Eight Ball  # trailing\n")
    assert cfg.n == 50 and cfg.virus == "Magic Eight Ball" and cfg.ttl == 7
    assert cfg.interval == pytest.approx(cfg.horizon / 100)


def test_missing_required_key():
    with pytest.raises(ScenarioParseError, match="'n'"):
        parse_scenario("horizon = 5\n")


@pytest.mark.parametrize("text, line", [
    ("n = 5\ncolour = red\n", 2),
    ("n = 5\n\nttl 3\n", 3),
    ("n = five\n", 1),
    ("n = 5\nn = 6\n", 2),
    ("n = 5\nreinfection = maybe\n", 2),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(ScenarioParseError) as err:
        parse_scenario(text)
    assert err.value.line == line


@pytest.mark.parametrize("changes", [
    {"n": 1}, {"initial_infected": 0}, {"initial_infected": 11}, {"vulnerability": 1.2},
    {"download_prob": -0.1}, {"query_rate": -1}, {"horizon": 0}, {"sample_interval": 0},
    {"churn_off": 1.0},
])
def test_invalid_configs(changes):
    with pytest.raises(ConfigError):
        ScenarioConfig(**{"n": 10, **changes})


def test_overrides():
    cfg = ScenarioConfig(n=10).with_overrides({"seed": "3", "reinfection": "off", "sample_interval": "none"})
    assert (cfg.seed, cfg.reinfection, cfg.sample_interval) == (3, False, None)
    with pytest.raises(ConfigError):
        cfg.with_overrides({"bogus": "1"})


configs = st.builds(
    ScenarioConfig,
    n=st.integers(2, 10_000),
    avg_degree=st.floats(2, 50),
    ttl=st.integers(0, 10),
    virus=st.sampled_from(["Swen", "Lirva", "Magic Eight Ball"]),
    initial_infected=st.just(1),
    vulnerability=st.floats(0.01, 1),
    reinfection=st.booleans(),
    query_rate=st.floats(0, 100),
    horizon=st.floats(1, 1000),
    sample_interval=st.one_of(st.none(), st.floats(0.01, 1)),
    seed=st.integers(0, 2**40),
    keyword_mix=st.floats(0, 1),
    copies_per_infection=st.one_of(st.none(), st.integers(1, 500)),
)


@given(configs)
def test_round_trip(cfg):
    assert parse_scenario(serialize_scenario(cfg)) == cfg
