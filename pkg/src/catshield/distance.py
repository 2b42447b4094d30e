"""Closed-form Hilbert-Schmidt distance between transmitted even and odd cats.

The distance ``2*pi * integral (W'_+ - W'_-)^2`` splits into the two purities
and the mutual overlap (also written Q or O). All three are built from the
Gaussian-integral factors ``M``, ``N`` and ``L``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

from .core import CatState, ChannelParams, Parity

__all__ = ["DistanceBreakdown", "HSFactors", "hs_factors", "purity", "overlap", "hs_distance"]


class HSFactors(NamedTuple):
    m: float
    n: float
    l: float  # noqa: E741


def _amplitude(state) -> tuple[float, float]:
    if isinstance(state, CatState):
        return state.x0, state.p0
    x0, p0 = state
    return float(x0), float(p0)


def hs_factors(state, ch: ChannelParams) -> HSFactors:
    """Factors ``M``, ``N``, ``L`` for amplitude ``(x0, p0)`` through ``ch``.

    ``state`` is a :class:`CatState` or an ``(x0, p0)`` pair; parity is irrelevant.
    The cosine in ``L`` carries ``x0 p0 (f_x^2/V_x - f_p^2/V_p)``: with a sum
    instead of the difference the identity channel would not give unit purity
    for complex amplitudes.
    """
    x0, p0 = _amplitude(state)
    x0sq, p0sq = x0 * x0, p0 * p0
    vx, vp = ch.v_x, ch.v_p
    gx, gp = ch.f_x * ch.f_x / vx, ch.f_p * ch.f_p / vp
    nx, np_ = ch.sigma_x / vx, ch.sigma_p / vp

    m = math.exp(-2.0 * gx * x0sq - 2.0 * gp * p0sq)
    n = math.exp(-2.0 * x0sq - 2.0 * p0sq) + math.exp(-2.0 * nx * p0sq - 2.0 * np_ * x0sq)
    half = 0.5 * (gx + gp)
    l = math.exp(-(half + np_) * x0sq - (half + nx) * p0sq) * math.cos(x0 * p0 * (gx - gp))  # noqa: E741
    return HSFactors(m, n, l)


def _purity(factors: HSFactors, norm_sq: float, sign: int, det: float) -> float:
    m, n, l = factors  # noqa: E741
    if sign > 0:
        parity_norm = 1.0 + math.exp(-norm_sq)
    else:
        parity_norm = -math.expm1(-norm_sq)
    return (1.0 + m + n + sign * 4.0 * l) / (2.0 * det * parity_norm**2)


def _overlap(factors: HSFactors, norm_sq: float, det: float) -> float:
    m, n, _ = factors
    # The (1 + e)(1 - e) product of the two parity normalisations.
    return (1.0 + m - n) / (2.0 * det * -math.expm1(-2.0 * norm_sq))


def purity(state: CatState, ch: ChannelParams) -> float:
    """``2*pi * integral W'^2`` of the transmitted cat; 1 for a pure state."""
    if state.parity is Parity.EVEN:
        sign = 1
    else:
        sign = -1
    det = math.sqrt(ch.v_x * ch.v_p)
    return _purity(hs_factors(state, ch), state.norm_sq, sign, det)


def overlap(state, ch: ChannelParams) -> float:
    """``2*pi * integral W'_+ W'_-`` for the two parities of amplitude ``(x0, p0)``."""
    x0, p0 = _amplitude(state)
    norm_sq = x0 * x0 + p0 * p0
    if norm_sq == 0.0:
        raise ValueError("overlap needs a nonzero amplitude (the odd cat is undefined)")
    det = math.sqrt(ch.v_x * ch.v_p)
    return _overlap(hs_factors((x0, p0), ch), norm_sq, det)


@dataclass(frozen=True)
class DistanceBreakdown:
    purity_even: float
    purity_odd: float
    overlap: float
    distance: float
    m_factor: float
    n_factor: float
    l_factor: float

    def as_dict(self) -> dict:
        return asdict(self)


def hs_distance(state, ch: ChannelParams) -> DistanceBreakdown:
    x0, p0 = _amplitude(state)
    norm_sq = x0 * x0 + p0 * p0
    if norm_sq == 0.0:
        raise ValueError("distance needs a nonzero amplitude (the odd cat is undefined)")
    det = math.sqrt(ch.v_x * ch.v_p)
    factors = hs_factors((x0, p0), ch)
    p_even = _purity(factors, norm_sq, 1, det)
    p_odd = _purity(factors, norm_sq, -1, det)
    q = _overlap(factors, norm_sq, det)
    # A squared norm; cancellation between nearly equal states can dip below zero by an ulp.
    return DistanceBreakdown(
        purity_even=p_even,
        purity_odd=p_odd,
        overlap=q,
        distance=max(0.0, p_even - 2.0 * q + p_odd),
        m_factor=factors.m,
        n_factor=factors.n,
        l_factor=factors.l,
    )
