import numpy as np
import pytest

from dcsim.engine import EventKind, RngStreams, SimulationError, seconds
from dcsim.links import (Distribution, LinkAvailabilityParams, LinkState, Outcome, Phase, advance_link, force_link,
                         sample_phase, transmit, uptime_fraction)


def rng(label="t"):
    return RngStreams(7).stream(label)


def test_params_validation():
    with pytest.raises(ValueError):
        LinkAvailabilityParams(0.0, 1.0)
    with pytest.raises(ValueError):
        LinkAvailabilityParams(1.0, -1.0)
    assert LinkAvailabilityParams(1.0, 0.0).never_fails


def test_deterministic_phase_is_the_mean():
    p = LinkAvailabilityParams(9.0, 1.0, Distribution.DETERMINISTIC)
    assert sample_phase(p, Phase.UP, rng()) == 9.0
    assert sample_phase(p, Phase.DOWN, rng()) == 1.0


def test_zero_downtime_phase_is_zero():
    assert sample_phase(LinkAvailabilityParams(9.0, 0.0), Phase.DOWN, rng()) == 0.0


def test_exponential_uptime_mean_over_a_million_draws():
    p = LinkAvailabilityParams(9.0, 1.0)
    g = rng("mean")
    draws = np.fromiter((sample_phase(p, Phase.UP, g) for _ in range(1_000_000)), float, 1_000_000)
    assert abs(draws.mean() - 9.0) < 0.05


def test_advance_link_toggles_and_schedules():
    p = LinkAvailabilityParams(9.0, 1.0, Distribution.DETERMINISTIC)
    link = LinkState("l", 10.0, 5.0)
    advance_link(link, EventKind.LINK_DOWN, p, rng(), 100)
    assert not link.up and link.effective_capacity == 0.0
    assert link.next_transition == 100 + seconds(1.0)
    assert link.epoch == 1
    advance_link(link, EventKind.LINK_UP, p, rng(), link.next_transition)
    assert link.up and link.effective_capacity == 10.0
    with pytest.raises(SimulationError):
        advance_link(link, EventKind.LINK_UP, p, rng(), link.next_transition)
    with pytest.raises(SimulationError):
        advance_link(link, EventKind.TIMER, p, rng(), 0)


def test_force_link_rejects_no_op():
    link = LinkState("l", 10.0, 5.0)
    with pytest.raises(SimulationError):
        force_link(link, True, 0)
    force_link(link, False, 10)
    assert link.transitions == [(10, False)]


def test_transmit_outcomes():
    link = LinkState("l", 80.0, 10.0)
    res = transmit(link, 1500, rng(), 0)
    assert res.outcome is Outcome.DELIVERED
    assert res.at == 10_150  # 10 ms propagation + 1500*8/80e6 s serialization
    lossy = LinkState("x", 80.0, 10.0, loss=1.0)
    assert transmit(lossy, 1500, rng(), 0).outcome is Outcome.LOST
    down = LinkState("d", 80.0, 10.0, up=False)
    assert transmit(down, 1500, rng(), 0).outcome is Outcome.BLOCKED


def test_transmit_is_a_fifo_serializer():
    link = LinkState("l", 8.0, 0.0)  # 1 byte per us
    assert transmit(link, 1000, None, 0).at == 1000
    assert transmit(link, 1000, None, 0).at == 2000
    assert transmit(link, 1000, None, 5000).at == 6000


def _run_renewal(params, horizon_s, label):
    """Drive one link through its renewal process; return the link and its state log."""
    g = rng(label)
    link = LinkState("l", 10.0, 1.0)
    end = seconds(horizon_s)
    link.next_transition = None if params.never_fails else seconds(sample_phase(params, Phase.UP, g))
    while link.next_transition is not None and link.next_transition <= end:
        kind = EventKind.LINK_DOWN if link.up else EventKind.LINK_UP
        advance_link(link, kind, params, g, link.next_transition)
    return link, end


def test_deterministic_cycles_are_exact():
    psi, gamma, horizon = 9.0, 1.0, 1000.5
    link, end = _run_renewal(LinkAvailabilityParams(psi, gamma, Distribution.DETERMINISTIC), horizon, "det")
    cycles = int(horizon // (psi + gamma))
    assert link.epoch == cycles  # one down-transition per full cycle; the remainder is uptime
    downs = [t for t, up in link.transitions if not up]
    assert downs[:3] == [seconds(9), seconds(19), seconds(29)]
    # full cycles contribute psi each; the 0.5 s remainder is spent up
    expected_up = cycles * psi + (horizon - cycles * (psi + gamma))
    assert uptime_fraction(link, 0, end) == pytest.approx(expected_up / horizon, abs=1e-12)


def test_exponential_renewal_converges_to_psi_over_psi_plus_gamma():
    link, end = _run_renewal(LinkAvailabilityParams(9.0, 1.0), 1.0e5, "conv")
    assert abs(uptime_fraction(link, 0, end) - 0.9) < 0.01


def test_never_failing_link_has_no_transitions():
    link, end = _run_renewal(LinkAvailabilityParams(9.0, 0.0), 100.0, "never")
    assert link.transitions == []
    assert uptime_fraction(link, 0, end) == 1.0
