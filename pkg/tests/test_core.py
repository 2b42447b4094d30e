import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catshield.channel import LossyStage, lossy_channel
from catshield.core import (
    IDENTITY,
    CatState,
    ChannelParams,
    Parity,
    PhasePoint,
    db_to_nats,
    nats_to_db,
    wigner_ideal,
    wigner_transformed,
)
from catshield.oracle import integrate_phase_space, QuadratureSpec, wigner_blocks_complex
from conftest import random_channel, random_state


def test_odd_cat_origin_is_minus_one_over_pi():
    assert wigner_ideal(CatState(3.0, 0.0, "odd"), 0.0, 0.0) == pytest.approx(-1 / math.pi, abs=1e-15)


def test_even_cat_origin_is_one_over_pi():
    assert wigner_ideal(CatState(3.0, 0.0, "even"), 0.0, 0.0) == pytest.approx(1 / math.pi, abs=1e-15)


def test_ideal_matches_complex_blocks_at_coherent_peak():
    state = CatState(3.0, 0.0, "odd")
    blocks = wigner_blocks_complex(state, 3.0, 0.0)
    assert abs(blocks.imag) < 1e-15
    assert wigner_ideal(state, *PhasePoint(3.0, 0.0)) == pytest.approx(blocks.real, abs=1e-15)
    # Diagonal blocks 1 and exp(-36), cross blocks exp(-9) each, odd normalisation.
    expected = 0.5 * (1 + math.exp(-36.0) - 2 * math.exp(-9.0)) / (math.pi * (1 - math.exp(-9.0)))
    assert blocks.real == pytest.approx(expected, abs=1e-15)


def test_lossy_odd_origin():
    ch = ChannelParams(math.sqrt(0.8), math.sqrt(0.8), 0.2, 0.2)
    expected = (math.exp(-7.2) - math.exp(-1.8)) / (math.pi * (1 - math.exp(-9.0)))
    assert wigner_transformed(CatState(3.0, 0.0, "odd"), ch) == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(-0.05238, abs=1e-5)


def test_half_loss_even_origin():
    ch = lossy_channel(LossyStage(0.5))
    expected = (2 * math.exp(-4.5)) / (math.pi * (1 + math.exp(-9.0)))
    assert wigner_transformed(CatState(3.0, 0.0, "even"), ch) == pytest.approx(expected, rel=1e-13)


def test_identity_channel_reduction(rng):
    for _ in range(50):
        state = random_state(rng)
        x, p = rng.normal(scale=3.0, size=2)
        assert wigner_transformed(state, IDENTITY, x, p) == pytest.approx(wigner_ideal(state, x, p), abs=1e-15)


def test_real_form_matches_complex_blocks(rng):
    from catshield.oracle import wigner_blocks_transformed, _blocks

    for _ in range(200):
        state = random_state(rng)
        ch = random_channel(rng)
        x, p = rng.normal(scale=3.0, size=2)
        complex_value = _blocks(state, x, p, *ch.as_tuple())
        assert abs(complex_value.imag) < 1e-12
        assert wigner_transformed(state, ch, x, p) == pytest.approx(
            wigner_blocks_transformed(state, ch, x, p), abs=1e-12
        )


def test_normalisation_random_pairs(rng):
    spec = QuadratureSpec(points_per_axis=256)
    worst = 0.0
    for _ in range(200):
        state = random_state(rng)
        ch = random_channel(rng)
        rx = abs(ch.f_x * state.x0) + 8 * math.sqrt(ch.v_x)
        rp = abs(ch.f_p * state.p0) + 8 * math.sqrt(ch.v_p)
        total = integrate_phase_space(
            lambda x, p: wigner_transformed(state, ch, x, p), spec, ((-rx, rx), (-rp, rp))
        )
        worst = max(worst, abs(total - 1.0))
    assert worst < 1e-6


@settings(max_examples=200, deadline=None)
@given(
    x0=st.floats(-8, 8),
    p0=st.floats(-8, 8),
    even=st.booleans(),
    eta=st.floats(0.01, 1.0),
    gamma=st.floats(-2, 2),
    v=st.floats(0.5, 5),
    x=st.floats(-10, 10),
    p=st.floats(-10, 10),
)
def test_point_symmetry(x0, p0, even, eta, gamma, v, x, p):
    if not even and x0 * x0 + p0 * p0 == 0:
        x0 = 1.0
    state = CatState(x0, p0, "even" if even else "odd")
    ch = lossy_channel(LossyStage(eta, gamma, v))
    a = wigner_transformed(state, ch, x, p)
    b = wigner_transformed(state, ch, -x, -p)
    assert a == pytest.approx(b, abs=1e-15, rel=1e-12)


def test_large_amplitude_stays_finite():
    state = CatState(20.0, 0.0, "even")  # |xi|^2 = 200
    ch = lossy_channel(LossyStage(0.7, 0.3, 1.0))
    xs = np.linspace(-30, 30, 121)
    values = wigner_transformed(state, ch, xs, 0.0)
    assert np.all(np.isfinite(values))
    peak = wigner_transformed(state, ch, ch.f_x * 20.0, 0.0)
    assert peak == pytest.approx(0.5 / (math.pi * math.sqrt(ch.v_x * ch.v_p)), rel=1e-12)


def test_vectorised_evaluation_matches_scalar(rng):
    state = random_state(rng)
    ch = random_channel(rng)
    xs, ps = rng.normal(size=(2, 10))
    grid = wigner_transformed(state, ch, xs, ps)
    assert isinstance(grid, np.ndarray)
    for x, p, value in zip(xs, ps, grid):
        assert wigner_transformed(state, ch, x, p) == value


def test_cat_state_validation():
    with pytest.raises(ValueError):
        CatState(0.0, 0.0, "odd")
    with pytest.raises(ValueError):
        CatState(1e-200, 0.0, "odd")
    with pytest.raises(ValueError):
        CatState(float("inf"), 0.0, "even")
    assert CatState(0.0, 0.0, "even").norm_sq == 0.0
    state = CatState(3.0, 4.0, Parity.ODD)
    assert state.norm_sq == 25.0
    assert 2 * abs(state.xi) ** 2 == pytest.approx(25.0, rel=1e-15)
    assert Parity.parse("-") is Parity.ODD


def test_channel_validation():
    with pytest.raises(ValueError):
        ChannelParams(0.0, 1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        ChannelParams(1.0, 1.0, -0.1, 0.0)
    ch = ChannelParams(0.5, 2.0, 0.25, 0.5)
    assert ch.v_x == 0.5 and ch.v_p == 4.5


@pytest.mark.parametrize(
    "db, nats",
    [(0.0, 0.0), (3.0, 3 * math.log(10) / 20), (1.0, math.log(10) / 20)],
)
def test_db_conversion(db, nats):
    assert db_to_nats(db) == pytest.approx(nats, abs=1e-15)
    # The variance ratio exp(2 g) is the dB figure.
    assert 10 * math.log10(math.exp(2 * db_to_nats(db))) == pytest.approx(db, abs=1e-12)


def test_db_three_is_0_3454_nats():
    assert round(db_to_nats(3.0), 4) == 0.3454


@pytest.mark.parametrize("db", range(-6, 7))
def test_db_round_trip(db):
    assert nats_to_db(db_to_nats(db)) == pytest.approx(db, abs=1e-12)
