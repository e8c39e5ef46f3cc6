import pytest
from hypothesis import given, settings, strategies as st

from dcsim.config import ConfigError, LinkConfig, ScriptedEvent, dump_config, load_config, parse_config, save_config
from dcsim.scenarios import CATALOG
from dcsim.simulation import Simulation, validate_scalars

from conftest import make_config


@pytest.mark.parametrize("entry", CATALOG, ids=lambda e: e.name)
def test_round_trip_is_byte_identical(entry):
    text = dump_config(entry.factory())
    assert dump_config(parse_config(text)) == text


def test_round_trip_through_a_file(tmp_path):
    cfg = make_config("Opt3x", (("b", "SCG_Split", "AtSN"),), seed=99)
    path = tmp_path / "s.yaml"
    save_config(cfg, path)
    assert load_config(path) == cfg


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), cap=st.floats(0.1, 1e4, allow_nan=False), loss=st.floats(0, 1),
       dur=st.floats(0.5, 1e5, allow_nan=False))
def test_round_trip_random_values(seed, cap, loss, dur):
    cfg = make_config(seed=seed, duration_s=dur,
                      mn_link=LinkConfig("mn-ue", "mn", "ue", capacity_mbps=cap, loss=loss))
    text = dump_config(cfg)
    assert dump_config(parse_config(text)) == text
    assert parse_config(text) == cfg


def test_comments_and_defaults():
    text = """
# minimal scenario
name: tiny
arch_option: Opt2_SA_NR
nodes:
  - {id: ue, role: UE}
  - {id: gw, role: CoreGateway}
  - {id: srv, role: AppServer}
  - {id: gnb, role: MN, radio: NR}
links:
  - {id: r, a: gnb, b: ue, capacity_mbps: 50}   # never fails by default
bearers:
  - {id: drb, kind: MCG}
mptcp:
  bearer: drb
"""
    cfg = parse_config(text)
    assert cfg.sample_interval_s == 0.5
    assert cfg.mptcp.detection_latency_ms == 200.0
    assert cfg.mptcp.t_interrupt_ms == 50.0
    assert cfg.mptcp.segment_bytes == 1500 and cfg.mptcp.buffer_segments == 1024
    assert cfg.links[0].gamma_s == 0.0
    Simulation(cfg)


@pytest.mark.parametrize("text,path", [
    ("name: x\narch_option: Opt2_SA_NR\nnodes: []\nlinks: []\nbearers: []\n", "mptcp"),
    ("- just a list\n", ""),
    ("name: [unclosed\n", ""),
])
def test_structural_errors(text, path):
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.path == path


def test_unknown_field_and_bad_number_name_their_path():
    base = dump_config(make_config())
    with pytest.raises(ConfigError, match=r"mptcp\.colour"):
        parse_config(base.replace("mptcp:\n", "mptcp:\n  colour: blue\n"))
    with pytest.raises(ConfigError, match=r"links\[0\]\.capacity_mbps"):
        parse_config(base.replace("capacity_mbps: 10.0", "capacity_mbps: fast", 1))


@pytest.mark.parametrize("change,path", [
    ({"duration_s": 0.0}, "duration_s"),
    ({"sample_interval_s": 0.0}, "sample_interval_s"),
    ({"events": [ScriptedEvent(5.0, "link_down", link="mn-ue")], "duration_s": 2.0}, "events[0].t_s"),
    ({"events": [ScriptedEvent(1.0, "explode", link="mn-ue")]}, "events[0].action"),
    ({"events": [ScriptedEvent(1.0, "link_down", link="nope")]}, "events[0].link"),
])
def test_scalar_validation(change, path):
    with pytest.raises(ConfigError) as err:
        validate_scalars(make_config().replace(**change))
    assert err.value.path == path


def test_mode_and_termination_are_checked():
    with pytest.raises(ConfigError, match="mptcp.mode"):
        Simulation(make_config(mode="Fastest"))
    with pytest.raises(ConfigError, match="mptcp.termination"):
        Simulation(make_config(termination="Somewhere"))
