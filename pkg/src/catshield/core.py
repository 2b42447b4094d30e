"""Cat states, separable Gaussian channel coefficients and their Wigner functions.

Quadratures follow ``[x, p] = i`` so that the vacuum Wigner function is
``exp(-x**2 - p**2) / pi`` and the vacuum variance is 1/2. A cat state of
amplitude ``xi`` is described by ``sqrt(2) * xi = x0 + 1j * p0``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "Parity",
    "CatState",
    "ChannelParams",
    "PhasePoint",
    "IDENTITY",
    "wigner_ideal",
    "wigner_transformed",
    "db_to_nats",
    "nats_to_db",
]


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"

    @property
    def sign(self) -> int:
        return 1 if self is Parity.EVEN else -1

    @classmethod
    def parse(cls, value) -> "Parity":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        aliases = {"+": "even", "-": "odd", "plus": "even", "minus": "odd"}
        return cls(aliases.get(text, text))


@dataclass(frozen=True)
class CatState:
    """Superposition of coherent states ``|xi>`` and ``|-xi>`` with a given parity."""

    x0: float
    p0: float = 0.0
    parity: Parity = Parity.ODD

    def __post_init__(self):
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "p0", float(self.p0))
        object.__setattr__(self, "parity", Parity.parse(self.parity))
        if not (math.isfinite(self.x0) and math.isfinite(self.p0)):
            raise ValueError("cat amplitude must be finite")
        if self.parity is Parity.ODD and self.norm_sq == 0.0:
            # also catches amplitudes whose square underflows
            raise ValueError("odd cat state is undefined at zero amplitude")

    @property
    def norm_sq(self) -> float:
        """``2 |xi|^2 = x0^2 + p0^2``."""
        return self.x0 * self.x0 + self.p0 * self.p0

    @property
    def xi(self) -> complex:
        return complex(self.x0, self.p0) / math.sqrt(2.0)

    def with_parity(self, parity) -> "CatState":
        return CatState(self.x0, self.p0, Parity.parse(parity))


@dataclass(frozen=True)
class ChannelParams:
    """Coefficients of the separable Gaussian kernel.

    The kernel maps ``(X, P)`` to ``(x', p')`` with gains ``f_x, f_p`` and added
    variances ``sigma_x, sigma_p`` (in the ``exp(-d**2 / sigma)`` convention).
    """

    f_x: float
    f_p: float
    sigma_x: float
    sigma_p: float

    def __post_init__(self):
        for name in ("f_x", "f_p", "sigma_x", "sigma_p"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.f_x <= 0 or self.f_p <= 0:
            raise ValueError("channel gains must be strictly positive")
        if self.sigma_x < 0 or self.sigma_p < 0:
            raise ValueError("added noise variances must be non-negative")

    @property
    def v_x(self) -> float:
        return self.sigma_x + self.f_x * self.f_x

    @property
    def v_p(self) -> float:
        return self.sigma_p + self.f_p * self.f_p

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.f_x, self.f_p, self.sigma_x, self.sigma_p)


IDENTITY = ChannelParams(1.0, 1.0, 0.0, 0.0)


class PhasePoint(NamedTuple):
    x: float
    p: float


def wigner_transformed(state: CatState, ch: ChannelParams, x=0.0, p=0.0):
    r"""Wigner function of ``state`` after the channel ``ch``, evaluated at ``(x, p)``.

    Uses the real form

    .. math::

        W' = \frac{e^{-x^2/V_x - p^2/V_p}}{\pi\sqrt{V_x V_p}(1 \pm e^{-x_0^2-p_0^2})}
             \left[e^{A}\cosh B \pm e^{C}\cos D\right]

    with every exponential folded into a single exponent so that large
    amplitudes neither overflow (``cosh``) nor lose the normalisation.
    ``x`` and ``p`` broadcast as numpy arrays; scalars give a float.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    x0, p0 = state.x0, state.p0
    fx, fp, sx, sp = ch.as_tuple()
    vx, vp = ch.v_x, ch.v_p
    sign = state.parity.sign

    envelope = -x * x / vx - p * p / vp
    a = -(fx * fx / vx) * x0 * x0 - (fp * fp / vp) * p0 * p0
    c = -(sx / vx) * p0 * p0 - (sp / vp) * x0 * x0
    b = np.abs(2.0 * (fx / vx * x0 * x + fp / vp * p0 * p))
    d = 2.0 * (fp / vp * x0 * p - fx / vx * p0 * x)

    # cosh(b) = exp(b) * (1 + exp(-2b)) / 2
    diagonal = np.exp(envelope + a + b) * (0.5 + 0.5 * np.exp(-2.0 * b))
    cross = np.exp(envelope + c) * np.cos(d)
    if sign > 0:
        norm = 1.0 + math.exp(-state.norm_sq)
    else:
        norm = -math.expm1(-state.norm_sq)
    value = (diagonal + sign * cross) / (math.pi * math.sqrt(vx * vp) * norm)
    return float(value) if value.ndim == 0 else value


def wigner_ideal(state: CatState, x=0.0, p=0.0):
    """Wigner function of the untransmitted cat state."""
    return wigner_transformed(state, IDENTITY, x, p)


_DB_PER_NAT = 20.0 / math.log(10.0)


def db_to_nats(db: float) -> float:
    """Squeezing rate from decibels of variance ratio: ``10*log10(exp(2*g)) = db``."""
    return db / _DB_PER_NAT


def nats_to_db(nats: float) -> float:
    return nats * _DB_PER_NAT
