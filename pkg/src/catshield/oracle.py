"""Brute-force quadrature references for the closed forms.

Nothing here calls :mod:`catshield.core`'s Wigner evaluation or the
distance/negativity formulas: the Wigner functions are rebuilt from the
complex-exponential coherent blocks, and the channel is applied by numerically
integrating against the Gaussian kernel. Agreement with the closed forms is
therefore evidence rather than a tautology.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .core import CatState, ChannelParams, Parity

__all__ = [
    "Scheme",
    "QuadratureSpec",
    "QuadratureWarning",
    "DEFAULT_SPEC",
    "nodes",
    "integrate_phase_space",
    "integrate_with_error",
    "wigner_blocks",
    "wigner_blocks_transformed",
    "wigner_numeric",
    "purity_numeric",
    "overlap_numeric",
    "distance_numeric",
    "auto_box",
]

# Gaussian tails are cut where exp(-r**2) ~ 1e-28.
_TAIL = 8.0


class Scheme(enum.Enum):
    GAUSS_LEGENDRE = "gauss-legendre"
    TRAPEZOID = "trapezoid"


class QuadratureWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor-product rule on a box.

    ``truncation_radius=None`` lets each routine pick a box from the Gaussian
    scales of its integrand. ``tol`` is the doubling-test threshold.
    """

    truncation_radius: float | None = None
    points_per_axis: int = 256
    scheme: Scheme = Scheme.GAUSS_LEGENDRE
    tol: float = 1e-9

    def __post_init__(self):
        if self.truncation_radius is not None and not self.truncation_radius > 0:
            raise ValueError("truncation radius must be positive")
        if self.points_per_axis < 64:
            raise ValueError("need at least 64 points per axis")
        object.__setattr__(self, "scheme", Scheme(self.scheme))

    def doubled(self) -> "QuadratureSpec":
        return QuadratureSpec(self.truncation_radius, 2 * self.points_per_axis, self.scheme, self.tol)


DEFAULT_SPEC = QuadratureSpec()


@lru_cache(maxsize=32)
def _reference_rule(n: int, scheme: Scheme) -> tuple[np.ndarray, np.ndarray]:
    if scheme is Scheme.GAUSS_LEGENDRE:
        t, w = np.polynomial.legendre.leggauss(n)
    else:
        t = np.linspace(-1.0, 1.0, n)
        w = np.full(n, 2.0 / (n - 1))
        w[0] = w[-1] = 1.0 / (n - 1)
    t.flags.writeable = False
    w.flags.writeable = False
    return t, w


def nodes(lo: float, hi: float, n: int, scheme: Scheme = Scheme.GAUSS_LEGENDRE):
    """Nodes and weights of an ``n``-point rule on ``[lo, hi]``."""
    t, w = _reference_rule(n, Scheme(scheme))
    half = 0.5 * (hi - lo)
    return 0.5 * (hi + lo) + half * t, half * w


Box = tuple[tuple[float, float], tuple[float, float]]


def _resolve_box(spec: QuadratureSpec, box: Box | None) -> Box:
    if box is not None:
        return box
    if spec.truncation_radius is None:
        raise ValueError("no integration box: pass `box` or set truncation_radius")
    r = spec.truncation_radius
    return ((-r, r), (-r, r))


def integrate_phase_space(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    spec: QuadratureSpec = DEFAULT_SPEC,
    box: Box | None = None,
) -> float:
    """Integral of ``f(x, p)`` over a box; ``f`` is called once on a meshgrid.

    Rows are reduced with ``math.fsum`` so the result does not depend on BLAS
    summation order.
    """
    (xlo, xhi), (plo, phi) = _resolve_box(spec, box)
    x, wx = nodes(xlo, xhi, spec.points_per_axis, spec.scheme)
    p, wp = nodes(plo, phi, spec.points_per_axis, spec.scheme)
    values = np.asarray(f(x[:, None], p[None, :]), dtype=float)
    values = np.broadcast_to(values, (x.size, p.size))
    return math.fsum((values * wp[None, :]).sum(axis=1) * wx)


def integrate_with_error(f, spec: QuadratureSpec = DEFAULT_SPEC, box: Box | None = None) -> tuple[float, float]:
    """Integral and the change observed when the points per axis are doubled.

    Warns with :class:`QuadratureWarning` when the change exceeds ``spec.tol``.
    """
    coarse = integrate_phase_space(f, spec, box)
    fine = integrate_phase_space(f, spec.doubled(), box)
    error = abs(fine - coarse)
    if error > spec.tol:
        warnings.warn(
            f"quadrature not converged: doubling changed the result by {error:.3e}",
            QuadratureWarning,
            stacklevel=2,
        )
    return fine, error


def _parity_sign(parity: Parity) -> int:
    return 1 if parity is Parity.EVEN else -1


def wigner_blocks(state: CatState, x, p):
    """Ideal cat Wigner function summed from its four complex coherent blocks.

    Returns the real part; the imaginary residue is checked by callers that
    care (see :func:`wigner_blocks_complex`).
    """
    return wigner_blocks_complex(state, x, p).real


def wigner_blocks_complex(state: CatState, x, p):
    return _blocks(state, x, p, 1.0, 1.0, 0.0, 0.0)


def wigner_blocks_transformed(state: CatState, ch: ChannelParams, x, p):
    """Transmitted cat Wigner function from the propagated complex blocks."""
    return _blocks(state, x, p, ch.f_x, ch.f_p, ch.sigma_x, ch.sigma_p).real


def _blocks(state, x, p, fx, fp, sx, sp):
    x = np.asarray(x, dtype=complex)
    p = np.asarray(p, dtype=complex)
    x0, p0 = state.x0, state.p0
    vx, vp = sx + fx * fx, sp + fp * fp
    amp = x0 * x0 + p0 * p0
    pref = 1.0 / (math.pi * math.sqrt(vx * vp))

    def block(ax, ap, damping):
        # Gaussian centred at the (possibly complex) point (ax, ap).
        return pref * np.exp(-((x - ax) ** 2) / vx - (p - ap) ** 2 / vp - damping)

    w_pp = block(fx * x0, fp * p0, 0.0)
    w_mm = block(-fx * x0, -fp * p0, 0.0)
    w_pm = block(1j * fx * p0, -1j * fp * x0, amp)
    w_mp = block(-1j * fx * p0, 1j * fp * x0, amp)
    sign = _parity_sign(state.parity)
    return 0.5 * (w_pp + sign * (w_pm + w_mp) + w_mm) / (1.0 + sign * math.exp(-amp))


def _kernel(ch: ChannelParams, x_out, p_out, x_in, p_in):
    sx, sp = ch.sigma_x, ch.sigma_p
    return np.exp(-((x_out - ch.f_x * x_in) ** 2) / sx - (p_out - ch.f_p * p_in) ** 2 / sp) / (
        math.pi * math.sqrt(sx * sp)
    )


def _overlap_interval(a: tuple[float, float], b: tuple[float, float]) -> tuple[float, float] | None:
    lo, hi = max(a[0], b[0]), min(a[1], b[1])
    return (lo, hi) if lo < hi else None


def wigner_numeric(
    state: CatState,
    ch: ChannelParams,
    x: float = 0.0,
    p: float = 0.0,
    spec: QuadratureSpec = DEFAULT_SPEC,
    check: bool = False,
) -> float:
    """Transmitted Wigner value at ``(x, p)`` by integrating the ideal one against the kernel.

    The box is the intersection of the input state's support with the
    kernel's support around ``(x/f_x, p/f_p)``, so narrow kernels stay
    resolved. A kernel with zero added noise is a delta function and is
    rejected.
    """
    if ch.sigma_x <= 0 or ch.sigma_p <= 0:
        raise ValueError("numeric transform needs strictly positive added noise")
    r = _TAIL if spec.truncation_radius is None else spec.truncation_radius
    state_x = (-abs(state.x0) - r, abs(state.x0) + r)
    state_p = (-abs(state.p0) - r, abs(state.p0) + r)
    kx = _TAIL * math.sqrt(ch.sigma_x) / ch.f_x
    kp = _TAIL * math.sqrt(ch.sigma_p) / ch.f_p
    box_x = _overlap_interval(state_x, (x / ch.f_x - kx, x / ch.f_x + kx))
    box_p = _overlap_interval(state_p, (p / ch.f_p - kp, p / ch.f_p + kp))
    if box_x is None or box_p is None:
        return 0.0

    def integrand(xi, pi):
        return wigner_blocks(state, xi, pi) * _kernel(ch, x, p, xi, pi)

    if check:
        return integrate_with_error(integrand, spec, (box_x, box_p))[0]
    return integrate_phase_space(integrand, spec, (box_x, box_p))


def auto_box(x0: float, p0: float, ch: ChannelParams, spec: QuadratureSpec = DEFAULT_SPEC) -> Box:
    """Box holding a transmitted cat: displaced blocks plus ``_TAIL`` widths per axis."""
    vx, vp = ch.sigma_x + ch.f_x**2, ch.sigma_p + ch.f_p**2
    if spec.truncation_radius is not None:
        r = spec.truncation_radius
        return ((-r, r), (-r, r))
    rx = abs(ch.f_x * x0) + _TAIL * math.sqrt(vx)
    rp = abs(ch.f_p * p0) + _TAIL * math.sqrt(vp)
    return ((-rx, rx), (-rp, rp))


def _integrate(f, box, spec, check):
    if check:
        return integrate_with_error(f, spec, box)[0]
    return integrate_phase_space(f, spec, box)


def purity_numeric(state: CatState, ch: ChannelParams, spec: QuadratureSpec = DEFAULT_SPEC, check=False) -> float:
    """``2*pi * integral W'^2`` by quadrature."""
    box = auto_box(state.x0, state.p0, ch, spec)
    return 2.0 * math.pi * _integrate(
        lambda x, p: wigner_blocks_transformed(state, ch, x, p) ** 2, box, spec, check
    )


def overlap_numeric(amplitude, ch: ChannelParams, spec: QuadratureSpec = DEFAULT_SPEC, check=False) -> float:
    """``2*pi * integral W'_+ W'_-`` by quadrature."""
    x0, p0 = amplitude
    even, odd = CatState(x0, p0, Parity.EVEN), CatState(x0, p0, Parity.ODD)
    box = auto_box(x0, p0, ch, spec)
    return 2.0 * math.pi * _integrate(
        lambda x, p: wigner_blocks_transformed(even, ch, x, p) * wigner_blocks_transformed(odd, ch, x, p),
        box,
        spec,
        check,
    )


def distance_numeric(amplitude, ch: ChannelParams, spec: QuadratureSpec = DEFAULT_SPEC, check=False) -> float:
    """``2*pi * integral (W'_+ - W'_-)^2`` by quadrature."""
    x0, p0 = amplitude
    even, odd = CatState(x0, p0, Parity.EVEN), CatState(x0, p0, Parity.ODD)
    box = auto_box(x0, p0, ch, spec)
    return 2.0 * math.pi * _integrate(
        lambda x, p: (wigner_blocks_transformed(even, ch, x, p) - wigner_blocks_transformed(odd, ch, x, p)) ** 2,
        box,
        spec,
        check,
    )
