import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gert.errors import (
    DomainError,
    EmptyInput,
    InconsistentObservation,
    MixedFrameSizes,
    Saturated,
)
from gert.estimator import (
    AccuracySpec,
    ChannelParams,
    FrameObservation,
    estimate,
    g,
    g_inverse,
    slot_probs,
    variance_z,
    z_statistic,
)

CH = ChannelParams(f=1000, p=0.7)

# 40-digit mpmath evaluations of (1 - 0.0007)**t and derived quantities
P0_1200 = 0.43158355994665575462
G_1200 = 0.13683288010668849077
G_1140 = 0.09979453732246566472
G_1260 = 0.17234730541531496827
VAR_1200 = 9.8127676292170861308e-4
T_AT_0135 = 1196.9707969134424318


def test_slot_probs_examples():
    assert slot_probs(0, CH) == (1.0, 0.0)
    p0, pn = slot_probs(1200, CH)
    assert p0 == pytest.approx(P0_1200, rel=1e-13)
    assert p0 + pn == 1.0
    assert slot_probs(1, ChannelParams(f=1, p=1.0)) == (0.0, 1.0)


def test_g_examples():
    assert g(0, CH) == -1.0
    assert g(1200, CH) == pytest.approx(G_1200, rel=1e-12)
    assert g(1140, CH) == pytest.approx(G_1140, rel=1e-12)
    assert g(1260, CH) == pytest.approx(G_1260, rel=1e-12)
    assert g(1140, CH) < g(1200, CH) < g(1260, CH)


def test_g_inverse_examples():
    assert g_inverse(-1.0, CH) == 0.0
    assert g_inverse(G_1200, CH) == pytest.approx(1200.0, rel=1e-9)
    with pytest.raises(Saturated):
        g_inverse(1.0, CH)


@pytest.mark.parametrize("bad", [-1.0000001, 1.5, float("nan")])
def test_g_inverse_rejects_out_of_range(bad):
    with pytest.raises(DomainError):
        g_inverse(bad, CH)


def test_variance_examples():
    assert variance_z(0, CH) == 0.0
    assert variance_z(1200, CH) == pytest.approx(VAR_1200, rel=1e-12)
    # p0 == pn == 1/2 exactly when (1 - p/f)**t == 1/2
    t_half = math.log(0.5) / math.log1p(-CH.q)
    assert variance_z(t_half, CH) == pytest.approx(1 / CH.f, rel=1e-12)


def test_variance_bounded():
    for t in (0, 1, 10, 500, 1200, 10_000, 100_000):
        assert 0.0 <= variance_z(t, CH) <= 1 / CH.f


def test_z_statistic_examples():
    assert z_statistic(FrameObservation.from_bits([0] * 8)) == -1.0
    assert z_statistic(FrameObservation.from_bits([1, 1, 0, 0])) == 0.0
    assert z_statistic(FrameObservation.from_bits([1, 1, 1, 0])) == 0.5


def test_z_statistic_inconsistent_counts():
    obs = FrameObservation(bits=np.array([1, 0, 0, 0], dtype=np.uint8), n_zero=2, n_nonempty=2, z=0.0)
    with pytest.raises(InconsistentObservation):
        z_statistic(obs)


def _frame_with_z(z, f=1000):
    nn = round((z + 1) * f / 2)
    return FrameObservation.from_bits([1] * nn + [0] * (f - nn))


def test_estimate_examples():
    res = estimate([_frame_with_z(-1.0), _frame_with_z(-1.0)], CH)
    assert res.z_bar == -1.0 and res.t_hat == 0.0 and not res.saturated

    res = estimate([_frame_with_z(0.12), _frame_with_z(0.15)], CH)
    assert res.z_bar == pytest.approx(0.135, abs=1e-15)
    assert res.t_hat == pytest.approx(T_AT_0135, rel=1e-9)
    assert res.rounds_used == 2

    res = estimate([_frame_with_z(1.0)] * 3, CH)
    assert res.saturated and res.t_hat is None and res.z_bar == 1.0


def test_estimate_errors():
    with pytest.raises(EmptyInput):
        estimate([], CH)
    with pytest.raises(MixedFrameSizes):
        estimate([_frame_with_z(0.0, f=1000), _frame_with_z(0.0, f=500)], CH)
    with pytest.raises(MixedFrameSizes):
        estimate([_frame_with_z(0.0, f=500)], CH)


@pytest.mark.parametrize(
    "kwargs",
    [dict(alpha=1.0, beta=0.05), dict(alpha=-0.1, beta=0.05), dict(alpha=0.9, beta=0.0), dict(alpha=0.9, beta=1.0)],
)
def test_accuracy_spec_validation(kwargs):
    with pytest.raises(DomainError):
        AccuracySpec(**kwargs)


@pytest.mark.parametrize("kwargs", [dict(f=0, p=0.5), dict(f=10, p=0.0), dict(f=10, p=1.5), dict(f=2.5, p=0.5)])
def test_channel_validation(kwargs):
    with pytest.raises(DomainError):
        ChannelParams(**kwargs)


channels = st.builds(
    ChannelParams,
    f=st.integers(min_value=1, max_value=20_000),
    p=st.floats(min_value=1e-3, max_value=1.0),
).filter(lambda ch: ch.q < 1)


@given(ch=channels, frac=st.floats(min_value=0.0, max_value=1.0))
def test_round_trip(ch, frac):
    t = frac * 10 * ch.f / ch.p
    assert abs(g_inverse(g(t, ch), ch) - t) <= 1e-6 * max(1.0, t)


@given(ch=channels, a=st.floats(0, 5), b=st.floats(0, 5))
def test_monotone_in_t(ch, a, b):
    t1, t2 = sorted((a * ch.f / ch.p, b * ch.f / ch.p))
    if t2 - t1 > 1e-6 * max(1.0, t2):
        g1, g2 = g(t1, ch), g(t2, ch)
        # strict unless both have rounded to the same double near the +1 asymptote
        assert g1 < g2 or (g1 == g2 and g1 > 1 - 1e-12)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=400))
def test_counts_identity(bits):
    obs = FrameObservation.from_bits(bits)
    f = len(bits)
    assert obs.n_zero + obs.n_nonempty == f
    # N_n - N_0 == 2 N_n - f holds in integers, so both quotients are the same double
    assert z_statistic(obs) == (2 * obs.n_nonempty - f) / f
    assert z_statistic(obs) == pytest.approx(2 * obs.n_nonempty / f - 1, abs=4e-16)
    assert obs.z == z_statistic(obs)


@settings(max_examples=50)
@given(ch=channels.filter(lambda c: c.q <= 1e-3), r=st.floats(0, 20))
def test_exponential_approximation_regime(ch, r):
    t = r * ch.f / ch.p
    assert abs(g(t, ch) - (1 - 2 * math.exp(-t * ch.q))) <= 1e-3
