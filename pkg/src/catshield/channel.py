"""Lossy thermal channels with squeezing, their composition and reduction."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .core import IDENTITY, ChannelParams

__all__ = [
    "LossyStage",
    "CompositeSpec",
    "ClassicalityReport",
    "EffectiveChannel",
    "squeezer",
    "lossy_channel",
    "concatenate",
    "composite_channel",
    "matched_mid_squeeze",
    "effective_single",
    "classicality_check",
]

VACUUM_VARIANCE = 0.5


@dataclass(frozen=True)
class LossyStage:
    """Squeezer of rate ``gamma`` followed by a beam splitter of transmittance ``eta``.

    The environment is a thermal state of variance ``v`` squeezed at rate
    ``gamma_t``. All rates are in nats.
    """

    eta: float
    gamma: float = 0.0
    v: float = VACUUM_VARIANCE
    gamma_t: float = 0.0

    def __post_init__(self):
        for name in ("eta", "gamma", "v", "gamma_t"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"transmittance must lie in (0, 1], got {self.eta}")
        if self.v < VACUUM_VARIANCE:
            raise ValueError(f"thermal variance must be at least {VACUUM_VARIANCE}, got {self.v}")

    @property
    def classical(self) -> bool:
        return classicality_check(self.v, self.gamma_t).classical

    def replace(self, **changes) -> "LossyStage":
        fields = dict(eta=self.eta, gamma=self.gamma, v=self.v, gamma_t=self.gamma_t)
        fields.update(changes)
        return LossyStage(**fields)


@dataclass(frozen=True)
class CompositeSpec:
    """Ordered chain of lossy stages; stage ``k`` squeezes, then loses."""

    stages: tuple[LossyStage, ...]

    def __init__(self, stages: Sequence[LossyStage]):
        stages = tuple(stages)
        if not stages:
            raise ValueError("a composite channel needs at least one stage")
        for stage in stages:
            if not isinstance(stage, LossyStage):
                raise TypeError(f"expected LossyStage, got {type(stage).__name__}")
        object.__setattr__(self, "stages", stages)

    def __len__(self) -> int:
        return len(self.stages)

    def with_gammas(self, *gammas: float) -> "CompositeSpec":
        """Copy with the squeezing rates of the leading stages replaced."""
        if len(gammas) > len(self.stages):
            raise ValueError("more squeezing rates than stages")
        stages = list(self.stages)
        for k, gamma in enumerate(gammas):
            stages[k] = stages[k].replace(gamma=gamma)
        return CompositeSpec(stages)


def squeezer(rate: float) -> ChannelParams:
    """Noiseless squeezer: x is scaled by ``exp(-rate)``, p by ``exp(+rate)``."""
    return ChannelParams(math.exp(-rate), math.exp(rate), 0.0, 0.0)


def lossy_channel(stage: LossyStage) -> ChannelParams:
    eta, gamma, v, gamma_t = stage.eta, stage.gamma, stage.v, stage.gamma_t
    root = math.sqrt(eta)
    noise = 2.0 * (1.0 - eta) * v
    return ChannelParams(
        f_x=root * math.exp(-gamma),
        f_p=root * math.exp(gamma),
        sigma_x=noise * math.exp(-2.0 * gamma_t),
        sigma_p=noise * math.exp(2.0 * gamma_t),
    )


def concatenate(first: ChannelParams, second: ChannelParams) -> ChannelParams:
    """Channel equivalent to ``first`` followed by ``second``.

    Noise added by ``first`` is rescaled by the gain of ``second``.
    """
    return ChannelParams(
        f_x=second.f_x * first.f_x,
        f_p=second.f_p * first.f_p,
        sigma_x=second.f_x * second.f_x * first.sigma_x + second.sigma_x,
        sigma_p=second.f_p * second.f_p * first.sigma_p + second.sigma_p,
    )


def composite_channel(spec: CompositeSpec | Sequence[LossyStage]) -> ChannelParams:
    if not isinstance(spec, CompositeSpec):
        spec = CompositeSpec(spec)
    channel = IDENTITY
    for stage in spec.stages:
        channel = concatenate(channel, lossy_channel(stage))
    return channel


def matched_mid_squeeze(spec: CompositeSpec) -> float:
    """Mid-squeezing rate that aligns the state with the second environment."""
    if len(spec) != 2:
        raise ValueError("matched mid-squeeze is defined for two-stage channels")
    first, second = spec.stages
    return second.gamma_t - first.gamma_t


class EffectiveChannel(NamedTuple):
    eta_e: float
    v_e: float


def effective_single(spec: CompositeSpec, mid_squeeze: float | None = None) -> EffectiveChannel:
    r"""Single lossy channel equivalent to a symmetrised two-stage chain.

    With the mid-squeeze matched to ``gamma_t' - gamma_t`` the chain equals
    ``lossy_channel(eta_e, gamma - gamma_t, v_e, 0)`` followed by a squeezer
    of rate ``gamma_t'``, where

    .. math::

        \eta_e = \eta\eta', \qquad
        V_e = \frac{(1-\eta')V' + (1-\eta)\eta' V}{1 - \eta\eta'}.

    Passing ``mid_squeeze`` checks that it is the matched rate.
    """
    if len(spec) != 2:
        raise ValueError("effective reduction needs exactly two stages")
    first, second = spec.stages
    if mid_squeeze is not None:
        expected = matched_mid_squeeze(spec)
        if not math.isclose(mid_squeeze, expected, rel_tol=1e-12, abs_tol=1e-12):
            raise ValueError(
                f"mid-squeeze {mid_squeeze} does not match gamma_t' - gamma_t = {expected}"
            )
    eta_e = first.eta * second.eta
    if eta_e >= 1.0:
        raise ValueError("both stages are lossless; the effective variance is undefined")
    v_e = ((1.0 - second.eta) * second.v + (1.0 - first.eta) * second.eta * first.v) / (1.0 - eta_e)
    return EffectiveChannel(eta_e, v_e)


class ClassicalityReport(NamedTuple):
    classical: bool
    threshold: float
    min_variance: float

    def __bool__(self) -> bool:
        return self.classical


def classicality_check(v: float, gamma_t: float) -> ClassicalityReport:
    """Whether an asymmetric thermal environment stays above vacuum in both quadratures.

    The squeezed quadrature has variance ``exp(-2|gamma_t|) * v``; vacuum is 1/2,
    so the largest classical asymmetry is ``0.5 * log(2 v)``.
    """
    if v < VACUUM_VARIANCE:
        raise ValueError(f"thermal variance must be at least {VACUUM_VARIANCE}, got {v}")
    min_variance = math.exp(-2.0 * abs(gamma_t)) * v
    threshold = 0.5 * math.log(2.0 * v)
    return ClassicalityReport(2.0 * min_variance >= 1.0, threshold, min_variance)
