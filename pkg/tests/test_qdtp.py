import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import MS, make_trace
from gateway_shield.errors import ConfigError, OrderingError
from gateway_shield.qdtp import (QdtpConfig, QdtpState, delay_recursion, departures, forward_one,
                                 shape_trace)

gaps = st.lists(st.integers(min_value=0, max_value=10 * MS), min_size=0, max_size=150)
spacing = st.integers(min_value=0, max_value=5 * MS)


def arrivals_from(gap_list, start=0):
    return np.concatenate([[start], start + np.cumsum(gap_list, dtype=np.int64)]).astype(np.int64)


def fold_forward(arrivals, d):
    state, out = QdtpState(), []
    for a in arrivals:
        dep, state = forward_one(state, QdtpConfig(d), int(a))
        out.append(dep)
    return out


def test_forward_one_hand_stepped():
    assert fold_forward([0, 1 * MS, 2 * MS], 3 * MS) == [0, 3 * MS, 6 * MS]
    assert fold_forward([0, 10 * MS, 20 * MS], 3 * MS) == [0, 10 * MS, 20 * MS]
    assert fold_forward([4, 4, 9], 0) == [4, 4, 9]


def test_forward_one_state():
    dep, st1 = forward_one(QdtpState(), QdtpConfig(3 * MS), 7)
    assert dep == 7 and st1 == QdtpState(7, 1, 7)
    with pytest.raises(OrderingError):
        forward_one(st1, QdtpConfig(3 * MS), 6)


def test_negative_spacing_rejected():
    with pytest.raises(ConfigError):
        QdtpConfig(-1)


def test_shape_trace_examples():
    assert shape_trace([], QdtpConfig()) == []
    shaped = shape_trace(make_trace([0, MS, 2 * MS]), QdtpConfig(3 * MS))
    assert [s.delay for s in shaped] == [0, 2 * MS, 4 * MS]
    assert [s.departure for s in shaped] == [0, 3 * MS, 6 * MS]
    wide = shape_trace(make_trace([0, 5 * MS, 11 * MS]), QdtpConfig(3 * MS))
    assert [s.delay for s in wide] == [0, 0, 0]


def test_delay_recursion_examples():
    assert delay_recursion([MS, MS], QdtpConfig(3 * MS)) == [0, 2 * MS, 4 * MS]
    assert delay_recursion([4 * MS, 3 * MS], QdtpConfig(3 * MS)) == [0, 0, 0]
    assert delay_recursion([], QdtpConfig(3 * MS)) == [0]
    with pytest.raises(OrderingError):
        delay_recursion([MS, -1], QdtpConfig(3 * MS))


@settings(max_examples=300, deadline=None)
@given(gaps, spacing, st.integers(0, 10**12))
def test_three_routes_agree(g, d, start):
    # unrolled vectorized form, per-packet state machine, and delay recursion
    a = arrivals_from(g, start)
    vec = departures(a, d)
    assert vec.tolist() == fold_forward(a, d)
    q = delay_recursion(list(g), QdtpConfig(d))
    assert (vec - a).tolist() == q


@settings(max_examples=300, deadline=None)
@given(gaps, spacing)
def test_pacing_and_work_conservation(g, d):
    a = arrivals_from(g)
    t = departures(a, d)
    assert np.all(np.diff(t) >= d)
    assert np.all(t >= a)
    # a packet that finds the forwarder idle (arrives after last departure + D) leaves at once
    idle = a[1:] >= t[:-1] + d
    assert np.all(t[1:][idle] == a[1:][idle])


@settings(max_examples=200, deadline=None)
@given(gaps, spacing, st.integers(0, 3 * MS))
def test_delay_monotone_in_d(g, d, extra):
    a = arrivals_from(g)
    assert np.all(departures(a, d + extra) - a >= departures(a, d) - a)


def test_departures_rejects_unsorted():
    with pytest.raises(OrderingError):
        departures(np.array([0, 5, 3]), 1)


@pytest.mark.parametrize("n", [3, 200])
def test_shape_trace_rejects_unsorted(n):
    times = list(range(0, n * MS, MS))
    times[1], times[2] = times[2], times[1]
    with pytest.raises(OrderingError):
        shape_trace(make_trace(times), QdtpConfig(MS))
