import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catshield.channel import (
    CompositeSpec,
    LossyStage,
    classicality_check,
    composite_channel,
    concatenate,
    effective_single,
    lossy_channel,
    matched_mid_squeeze,
    squeezer,
)
from catshield.core import IDENTITY, CatState, ChannelParams, db_to_nats, wigner_transformed
from conftest import random_channel, random_stage


def assert_channel_close(a: ChannelParams, b: ChannelParams, tol: float):
    np.testing.assert_allclose(a.as_tuple(), b.as_tuple(), rtol=0, atol=tol)


def eq14(eta, eta2, gamma, gamma2, v, v2, gt, gt2):
    """Two-stage coefficients with the first environment's variance in both noise terms."""
    root = math.sqrt(eta * eta2)
    return (
        root * math.exp(-(gamma + gamma2)),
        root * math.exp(gamma + gamma2),
        2 * (1 - eta2) * math.exp(-2 * gt2) * v2 + 2 * eta2 * (1 - eta) * math.exp(-2 * (gamma2 + gt)) * v,
        2 * (1 - eta2) * math.exp(2 * gt2) * v2 + 2 * eta2 * (1 - eta) * math.exp(2 * (gamma2 + gt)) * v,
    )


def test_lossless_stage_is_identity():
    assert lossy_channel(LossyStage(1.0, 0.0, 0.5, 0.0)) == IDENTITY


def test_half_loss_vacuum():
    ch = lossy_channel(LossyStage(0.5))
    np.testing.assert_allclose(ch.as_tuple(), (math.sqrt(0.5), math.sqrt(0.5), 0.5, 0.5), atol=1e-15)


def test_asymmetric_stage_values():
    ch = lossy_channel(LossyStage(0.8, 0.1, 1.0, db_to_nats(1.0)))
    assert ch.f_x == pytest.approx(0.80931, abs=5e-6)
    assert ch.sigma_x == pytest.approx(0.31773, abs=5e-6)
    assert ch.f_p == pytest.approx(math.sqrt(0.8) * math.exp(0.1), abs=1e-15)
    assert round(ch.f_p, 5) == 0.98849
    assert ch.sigma_p == pytest.approx(0.50357, abs=5e-6)
    assert ch.sigma_x * ch.sigma_p == pytest.approx(0.16, rel=1e-14)


@pytest.mark.parametrize("eta", [0.0, -0.1, 1.01, float("nan")])
def test_stage_rejects_bad_transmittance(eta):
    with pytest.raises(ValueError):
        LossyStage(eta)


def test_stage_rejects_subvacuum_variance():
    with pytest.raises(ValueError):
        LossyStage(0.5, v=0.4)


def test_concatenate_identity_laws(rng):
    for _ in range(20):
        c = random_channel(rng)
        assert concatenate(IDENTITY, c) == c
        assert concatenate(c, IDENTITY) == c


def test_pure_losses_compose(rng):
    for _ in range(20):
        eta, eta2 = rng.uniform(0.05, 1.0, size=2)
        chained = composite_channel([LossyStage(eta), LossyStage(eta2)])
        assert_channel_close(chained, lossy_channel(LossyStage(eta * eta2)), 1e-15)


def test_composite_matches_two_stage_closed_form(rng):
    worst = 0.0
    for _ in range(1000):
        first, second = random_stage(rng), random_stage(rng)
        chained = composite_channel(CompositeSpec([first, second]))
        via_squeezer = concatenate(
            concatenate(lossy_channel(first), squeezer(second.gamma)), lossy_channel(second.replace(gamma=0.0))
        )
        closed = eq14(first.eta, second.eta, first.gamma, second.gamma, first.v, second.v, first.gamma_t, second.gamma_t)
        worst = max(worst, np.max(np.abs(np.subtract(chained.as_tuple(), closed))))
        assert_channel_close(chained, via_squeezer, 1e-12)
    assert worst < 1e-12


def test_single_stage_composite():
    stage = LossyStage(0.7, 0.2, 1.3, -0.1)
    assert composite_channel(CompositeSpec([stage])) == lossy_channel(stage)


def test_composite_requires_stages():
    with pytest.raises(ValueError):
        CompositeSpec([])


def test_composite_thermal_example():
    ch = composite_channel([LossyStage(0.9, v=0.5), LossyStage(0.9, v=2.0)])
    v_e = 0.245 / 0.19
    assert ch.sigma_x == pytest.approx(2 * (1 - 0.81) * v_e, abs=1e-15)
    assert ch.sigma_p == pytest.approx(2 * (1 - 0.81) * v_e, abs=1e-15)


@pytest.mark.parametrize(
    "eta, eta2, v, v2, expected",
    [
        (0.9, 0.8, 0.5, 0.5, (0.72, 0.5)),
        (0.9, 0.9, 0.5, 2.0, (0.81, 0.245 / 0.19)),
        (0.6, 1.0, 1.7, 3.0, (0.6, 1.7)),
    ],
)
def test_effective_single_values(eta, eta2, v, v2, expected):
    eff = effective_single(CompositeSpec([LossyStage(eta, v=v), LossyStage(eta2, v=v2)]))
    assert eff.eta_e == pytest.approx(expected[0], abs=1e-15)
    assert eff.v_e == pytest.approx(expected[1], abs=1e-14)


def test_effective_single_rejects_lossless_chain():
    with pytest.raises(ValueError):
        effective_single(CompositeSpec([LossyStage(1.0), LossyStage(1.0)]))


def test_effective_single_checks_mid_squeeze():
    spec = CompositeSpec([LossyStage(0.9, gamma_t=0.1), LossyStage(0.8, gamma_t=0.3)])
    assert matched_mid_squeeze(spec) == pytest.approx(0.2)
    effective_single(spec, mid_squeeze=0.2)
    with pytest.raises(ValueError):
        effective_single(spec, mid_squeeze=0.0)


def test_effective_channel_equivalence(rng):
    """Matched chain == effective loss (pre-squeeze shifted by gamma_t) then a squeezer."""
    for _ in range(300):
        first, second = random_stage(rng), random_stage(rng)
        if first.eta * second.eta > 0.999:
            continue
        mid = second.gamma_t - first.gamma_t
        spec = CompositeSpec([first, second.replace(gamma=mid)])
        eff = effective_single(spec, mid_squeeze=mid)
        single = concatenate(
            lossy_channel(LossyStage(eff.eta_e, first.gamma - first.gamma_t, eff.v_e, 0.0)),
            squeezer(second.gamma_t),
        )
        assert_channel_close(composite_channel(spec), single, 1e-12)

        state = CatState(*rng.normal(scale=2.0, size=2), "odd")
        for out in (-0.7, 0.0, 1.1):
            symmetric = concatenate(lossy_channel(LossyStage(eff.eta_e, first.gamma, eff.v_e, 0.0)), squeezer(out))
            shifted_spec = CompositeSpec([first.replace(gamma=first.gamma + first.gamma_t), second.replace(gamma=mid)])
            assert wigner_transformed(state, composite_channel(shifted_spec)) == pytest.approx(
                wigner_transformed(state, symmetric), abs=1e-10
            )


@settings(max_examples=300, deadline=None)
@given(
    st.lists(
        st.tuples(st.floats(0.01, 1.0), st.floats(-1.5, 1.5), st.floats(0.5, 4.0), st.floats(-1.0, 1.0)),
        min_size=3,
        max_size=3,
    )
)
def test_concatenate_associative(params):
    a, b, c = (lossy_channel(LossyStage(*p)) for p in params)
    left = concatenate(concatenate(a, b), c)
    right = concatenate(a, concatenate(b, c))
    np.testing.assert_allclose(left.as_tuple(), right.as_tuple(), rtol=1e-14, atol=1e-14)


def test_input_referred_noise_never_decreases(rng):
    for _ in range(500):
        c = random_channel(rng)
        combined = concatenate(c, lossy_channel(random_stage(rng)))
        before = c.sigma_x * c.sigma_p / (c.f_x * c.f_p) ** 2
        after = combined.sigma_x * combined.sigma_p / (combined.f_x * combined.f_p) ** 2
        assert after >= before * (1 - 1e-12)


def test_absolute_noise_can_drop_under_vacuum_loss():
    noisy = lossy_channel(LossyStage(0.1, v=5.0))
    combined = concatenate(noisy, lossy_channel(LossyStage(0.5)))
    assert combined.sigma_x * combined.sigma_p < noisy.sigma_x * noisy.sigma_p


@pytest.mark.parametrize(
    "v, gamma_t, classical",
    [(0.5, 0.0, True), (0.5, 0.1, False), (1.0, 0.34, True), (1.0, 0.35, False), (1.0, -0.35, False)],
)
def test_classicality(v, gamma_t, classical):
    report = classicality_check(v, gamma_t)
    assert report.classical is classical
    assert bool(report) is classical


def test_classicality_threshold():
    assert classicality_check(1.0, 0.0).threshold == pytest.approx(0.5 * math.log(2.0), abs=1e-15)
    assert LossyStage(0.5, v=1.0, gamma_t=0.3).classical
    assert not LossyStage(0.5, v=1.0, gamma_t=0.4).classical
