"""Central negativity of odd cats and channel conditions for surviving negativity."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core import CatState, ChannelParams, Parity

__all__ = [
    "FeasibleRegion",
    "central_negativity",
    "negativity_margin",
    "negativity_possible",
    "feasible_region",
    "feasible_v",
    "eta_min",
]

# Relative slack on f_x^2 f_p^2 vs sigma_x sigma_p: squaring sqrt(eta) is off by
# a few ulp, which must not push an exact boundary channel to "negative".
_BOUNDARY_RTOL = 1e-13


def central_negativity(state: CatState, ch: ChannelParams) -> float:
    """Value of the transmitted odd-cat Wigner function at the origin.

    Negative iff :func:`negativity_possible` holds. The difference of the two
    exponentials is taken through ``expm1`` so the lossless value is exactly
    ``-1/pi`` and the half-loss boundary is exactly zero.
    """
    if state.parity is not Parity.ODD:
        raise ValueError("central negativity is defined for odd-parity cat states")
    x0sq, p0sq = state.x0 * state.x0, state.p0 * state.p0
    vx, vp = ch.v_x, ch.v_p
    signal = -(ch.f_x * ch.f_x / vx) * x0sq - (ch.f_p * ch.f_p / vp) * p0sq
    noise = -(ch.sigma_x / vx) * p0sq - (ch.sigma_p / vp) * x0sq
    norm = math.pi * math.sqrt(vx * vp) * -math.expm1(-state.norm_sq)
    return math.exp(noise) * math.expm1(signal - noise) / norm


def negativity_margin(ch: ChannelParams) -> float:
    """``f_x^2 f_p^2 - sigma_x sigma_p``; positive means negativity can survive.

    The main-text condition is used. The unsquared ``f_x f_p`` variant printed
    alongside the odd-cat proof does not follow from comparing the exponents.
    """
    gain = (ch.f_x * ch.f_p) ** 2
    return gain - ch.sigma_x * ch.sigma_p


def negativity_possible(ch: ChannelParams) -> bool:
    """Channel condition for Wigner negativity to survive transmission.

    Necessary and sufficient for the central negativity of odd cats, only
    necessary for negativity anywhere in either parity. Exactly on the
    boundary the answer is ``False``.
    """
    gain = (ch.f_x * ch.f_p) ** 2
    noise = ch.sigma_x * ch.sigma_p
    return gain - noise > _BOUNDARY_RTOL * max(gain, noise)


def eta_min(v: float) -> float:
    """Smallest transmittance keeping negativity through a thermal loss of variance ``v``."""
    return 2.0 * v / (1.0 + 2.0 * v)


def feasible_v(eta: float) -> float:
    """Largest thermal variance keeping negativity at transmittance ``eta`` (strict bound)."""
    if not 0.0 < eta < 1.0:
        raise ValueError(f"transmittance must lie in (0, 1), got {eta}")
    return eta / (2.0 * (1.0 - eta))


@dataclass(frozen=True)
class FeasibleRegion:
    """Open interval ``eta_min < eta < eta_max`` of transmittances for a fixed variance."""

    eta_min: float
    eta_max: float
    v_max: float

    @property
    def empty(self) -> bool:
        return self.eta_min >= self.eta_max

    def contains(self, eta: float) -> bool:
        return self.eta_min < eta < self.eta_max

    def as_dict(self) -> dict:
        return {"eta_min": self.eta_min, "eta_max": self.eta_max, "v_max": self.v_max}


def feasible_region(v: float) -> FeasibleRegion:
    """Transmittances for which loss with thermal variance ``v`` can keep negativity.

    The region does not depend on pre-squeezing or on the environment asymmetry.
    ``v_max`` is the variance at which the region closes (unbounded).
    """
    if v <= 0:
        raise ValueError(f"thermal variance must be positive, got {v}")
    return FeasibleRegion(eta_min(v), 1.0, math.inf)
