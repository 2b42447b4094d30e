"""Optimal protective squeezing for central negativity and Hilbert-Schmidt distance."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .channel import CompositeSpec, LossyStage, composite_channel, lossy_channel
from .core import CatState, Parity
from .distance import hs_distance
from .negativity import central_negativity, negativity_possible

__all__ = [
    "DEFAULT_BRACKET",
    "ScalarMax",
    "OptimizationResult",
    "NonConvergenceError",
    "scalar_maximize",
    "optimize_presqueeze_cn",
    "optimize_composite",
    "optimize_presqueeze_hs",
]

DEFAULT_BRACKET = (-3.0, 3.0)
DEFAULT_TOL = 1e-8
SCAN_POINTS = 61
# Objectives whose coarse scan spread is below this are treated as flat.
FLAT_ATOL = 1e-13


class NonConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class ScalarMax:
    argmax: float
    value: float
    evaluations: int
    converged: bool
    flat: bool = False


def scalar_maximize(
    f: Callable[[float], float],
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    tol: float = DEFAULT_TOL,
    scan_points: int = SCAN_POINTS,
    max_evaluations: int = 500,
) -> ScalarMax:
    """Maximise a scalar function on a closed interval.

    A coarse scan picks the best grid cell, which is then refined by
    bounded Brent (golden section with parabolic steps) on the two
    neighbouring cells. An objective that is constant on the scan returns the
    point of the bracket closest to zero with ``flat=True``. Hitting
    ``max_evaluations`` is reported through ``converged=False``.
    """
    lo, hi = map(float, bracket)
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise ValueError(f"invalid bracket {bracket!r}")
    grid = np.linspace(lo, hi, scan_points)
    values = np.array([f(g) for g in grid], dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonConvergenceError("objective is not finite on the bracket")
    evaluations = scan_points

    spread = values.max() - values.min()
    if spread <= FLAT_ATOL * max(1.0, abs(values.max())):
        x = min(max(0.0, lo), hi)
        return ScalarMax(x, float(f(x)), evaluations + 1, True, flat=True)

    k = int(np.argmax(values))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, scan_points - 1)]
    res = minimize_scalar(
        lambda g: -f(g),
        bounds=(a, b),
        method="bounded",
        options={"xatol": tol, "maxiter": max_evaluations},
    )
    evaluations += int(res.nfev)
    x, value = float(res.x), float(-res.fun)
    # Brent never evaluates the end points; keep a better scan point if one exists.
    if values[k] > value:
        x, value = float(grid[k]), float(values[k])
    return ScalarMax(x, value, evaluations, bool(res.success))


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of a squeezing optimisation.

    ``objective`` is the attained central negativity (negative is better) or
    the attained distance. ``baseline`` is the objective without squeezing.
    """

    gamma_opt: float
    objective: float
    baseline: float
    evaluations: int
    converged: bool
    bracket: tuple[float, float]
    gamma_mid_opt: float | None = None
    feasible: bool = True
    flat: bool = False
    rounds: int = 0
    message: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


def _no_protection(objective: float, bracket, message: str) -> OptimizationResult:
    return OptimizationResult(
        gamma_opt=0.0,
        objective=objective,
        baseline=objective,
        evaluations=1,
        converged=True,
        bracket=bracket,
        feasible=False,
        message=message,
    )


def _require_odd(state: CatState) -> None:
    if state.parity is not Parity.ODD:
        raise ValueError("central-negativity optimisation needs an odd-parity cat")


def optimize_presqueeze_cn(
    state: CatState,
    eta: float,
    v: float,
    gamma_t: float = 0.0,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    tol: float = DEFAULT_TOL,
) -> OptimizationResult:
    """Pre-squeezing rate that makes the transmitted central negativity deepest."""
    _require_odd(state)
    stage = LossyStage(eta, 0.0, v, gamma_t)
    baseline = central_negativity(state, lossy_channel(stage))
    if not negativity_possible(lossy_channel(stage)):
        return _no_protection(baseline, bracket, "no pre-squeezing can protect negativity in this channel")

    def depth(gamma: float) -> float:
        return -central_negativity(state, lossy_channel(stage.replace(gamma=gamma)))

    best = scalar_maximize(depth, bracket, tol)
    return OptimizationResult(
        gamma_opt=best.argmax,
        objective=-best.value,
        baseline=baseline,
        evaluations=best.evaluations,
        converged=best.converged,
        bracket=bracket,
        flat=best.flat,
    )


def optimize_composite(
    state: CatState,
    spec: CompositeSpec,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    tol: float = DEFAULT_TOL,
    max_rounds: int = 50,
    step_tol: float = 1e-6,
) -> OptimizationResult:
    """Joint pre- and mid-squeezing for a two-stage chain.

    Alternates scalar maximisations over the pre-squeeze and the mid-squeeze
    until both move less than ``step_tol``. The squeezing rates already set on
    ``spec`` are ignored.
    """
    _require_odd(state)
    if len(spec) != 2:
        raise ValueError("composite optimisation needs exactly two stages")
    baseline = central_negativity(state, composite_channel(spec.with_gammas(0.0, 0.0)))

    def depth(pre: float, mid: float) -> float:
        return -central_negativity(state, composite_channel(spec.with_gammas(pre, mid)))

    # Output squeezing does not move the origin, so with the mid-squeeze at
    # its matched value the chain is a single loss whose condition decides.
    first, second = spec.stages
    matched = composite_channel(spec.with_gammas(0.0, second.gamma_t - first.gamma_t))
    if not negativity_possible(matched):
        return _no_protection(baseline, bracket, "no squeezing can protect negativity in this chain")

    pre, mid = 0.0, 0.0
    evaluations, converged, flat = 0, False, False
    value = depth(pre, mid)
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        step_pre = scalar_maximize(lambda g: depth(g, mid), bracket, tol)
        step_mid = scalar_maximize(lambda g: depth(step_pre.argmax, g), bracket, tol)
        evaluations += step_pre.evaluations + step_mid.evaluations
        moved = max(abs(step_pre.argmax - pre), abs(step_mid.argmax - mid))
        pre, mid, value = step_pre.argmax, step_mid.argmax, step_mid.value
        if step_pre.flat and step_mid.flat:
            flat = True
        if moved < step_tol:
            converged = step_pre.converged and step_mid.converged
            break
    return OptimizationResult(
        gamma_opt=pre,
        gamma_mid_opt=mid,
        objective=-value,
        baseline=baseline,
        evaluations=evaluations,
        converged=converged,
        bracket=bracket,
        flat=flat,
        rounds=rounds,
    )


def optimize_presqueeze_hs(
    amplitude,
    eta: float,
    v: float,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    tol: float = DEFAULT_TOL,
) -> OptimizationResult:
    """Pre-squeezing rate maximising the distance between transmitted even and odd cats.

    The environment is taken symmetric; an asymmetric one only shifts the
    optimum by its asymmetry rate.
    """
    if isinstance(amplitude, CatState):
        amplitude = (amplitude.x0, amplitude.p0)
    stage = LossyStage(eta, 0.0, v, 0.0)

    def distance(gamma: float) -> float:
        return hs_distance(amplitude, lossy_channel(stage.replace(gamma=gamma))).distance

    baseline = distance(0.0)
    best = scalar_maximize(distance, bracket, tol)
    return OptimizationResult(
        gamma_opt=best.argmax,
        objective=best.value,
        baseline=baseline,
        evaluations=best.evaluations,
        converged=best.converged,
        bracket=bracket,
        flat=best.flat,
    )
