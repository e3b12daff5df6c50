"""Steady-state and threshold analytics.

Below critical pumping (g < 1) the resonant equations have a fixed point
with sinh^2(u) = n_th and tanh(2u) = g, giving closed forms for every
observable.  Above critical pumping only the squeezed quadrature limit
1/sqrt(1+g) survives; it is the natural reference level for the
threshold-time analysis of strong pumping.
"""

import math
from dataclasses import dataclass

from . import kernels
from .core_model import StsState, PumpConfig, observables_from_state
from .errors import (
    DegenerateTargetError,
    DomainError,
    NoSteadyStateError,
    ThresholdNotReachedError,
    UndefinedCorrelationError,
)
from .sts_dynamics import integrate

# |dX(tau*) - target| accepted by the threshold bisection.
ROOT_TOL = 1e-9


@dataclass(frozen=True)
class SteadyStateResult:
    """Fixed-point state and observables for sub-critical pumping.

    g2_ss is None at g = 0 (no photons, correlation undefined).
    """

    u_ss: float
    n_th_ss: float
    n_mean_ss: float
    dx_ss: float
    dy_ss: float
    product_ss: float
    g2_ss: float | None


@dataclass(frozen=True)
class QuadratureLimits:
    """Asymptotic noise levels; dy_ss/product_ss are None for g >= 1."""

    dx_ss: float
    dy_ss: float | None
    product_ss: float | None


@dataclass(frozen=True)
class ThresholdResult:
    """First time dX comes within a fraction delta of its asymptote."""

    tau_star: float
    state_at_threshold: StsState
    observables_at_threshold: object
    delta: float


def steady_state(g):
    """Closed-form fixed point for 0 <= g < 1.

    u_ss = atanh(g)/2, n_th_ss = (1 - sqrt(1-g^2)) / (2 sqrt(1-g^2)) and
    <n>_ss = g^2 / (2 (1-g^2)); n_th_ss is evaluated in the cancellation
    free form g^2 / (2 r (1+r)) with r = sqrt(1-g^2).
    """
    if not (0.0 <= g < 1.0):
        raise NoSteadyStateError(
            f"steady state exists only for 0 <= g < 1 (weak pumping), got g={g}"
        )
    r = math.sqrt((1.0 - g) * (1.0 + g))
    n_th = g * g / (2.0 * r * (1.0 + r))
    return SteadyStateResult(
        u_ss=0.5 * math.atanh(g),
        n_th_ss=n_th,
        n_mean_ss=g * g / (2.0 * r * r),
        dx_ss=1.0 / math.sqrt(1.0 + g),
        dy_ss=1.0 / math.sqrt(1.0 - g),
        product_ss=1.0 / r,
        g2_ss=None if g == 0.0 else _g2_at_nth(n_th, g),
    )


def quad_limits(g):
    """Asymptotic quadrature noise (dx_ss, dy_ss, product_ss).

    dx_ss = 1/sqrt(1+g) holds for any g >= 0; dy_ss = 1/sqrt(1-g) and
    product_ss = 1/sqrt(1-g^2) exist only below critical pumping and are
    None otherwise (dY grows without bound there, not an error).
    """
    if not (g >= 0.0):
        raise DomainError(f"pump ratio must be >= 0, got {g}")
    dx = 1.0 / math.sqrt(1.0 + g)
    if g < 1.0:
        return QuadratureLimits(
            dx_ss=dx,
            dy_ss=1.0 / math.sqrt(1.0 - g),
            product_ss=1.0 / math.sqrt((1.0 - g) * (1.0 + g)),
        )
    return QuadratureLimits(dx_ss=dx, dy_ss=None, product_ss=None)


def _g2_at_nth(n_th, g):
    # steady-state correlation in terms of the steady-state n_th and g
    half = n_th + 0.5
    root = math.sqrt(n_th * n_th + n_th)
    denom = (2.0 * n_th / g) * root + n_th
    return 2.0 + 4.0 * half * half * (n_th * n_th + n_th) / (denom * denom)


def g2_ss(g):
    """Steady-state second-order correlation for 0 < g < 1.

    Always > 3, decreasing toward 3 as g -> 1: the intracavity light is
    more strongly bunched than thermal light (g2 = 2) at any sub-critical
    pump.
    """
    if g >= 1.0:
        raise NoSteadyStateError(f"no steady state at g={g} >= 1")
    if not (g > 0.0):
        raise UndefinedCorrelationError("g2 undefined at g <= 0: cavity holds no photons")
    return _g2_at_nth(steady_state(g).n_th_ss, g)


def svs_g2(n_mean):
    """Second-order correlation 3 + 1/<n> of a squeezed vacuum state.

    Comparison curve for the steady-state result: for the same photon
    number, a lossless squeezed vacuum is the n_th = 0 limit.
    """
    if not (n_mean > 0.0):
        raise UndefinedCorrelationError(
            f"SVS g2 needs a positive photon number, got {n_mean}"
        )
    return 3.0 + 1.0 / n_mean


def _dx_of(u, n_th):
    return math.sqrt(2.0 * n_th + 1.0) * math.exp(-u)


def find_threshold(g, delta, ctrl):
    """First tau where dX(tau) = (1+delta)/sqrt(1+g), starting from vacuum.

    The integrated trajectory brackets the crossing on its sample grid;
    bisection with re-integration from the bracketing sample then locates
    it to |dX - target| <= ROOT_TOL.  Raises DegenerateTargetError when
    the target exceeds the vacuum noise (delta so large nothing needs to
    happen) and ThresholdNotReachedError when ctrl.tau_end is too short.
    """
    if not (g > 0.0):
        raise DomainError(f"threshold needs g > 0, got {g}")
    if not (delta > 0.0):
        raise DomainError(f"threshold needs delta > 0, got {delta}")
    target = (1.0 + delta) / math.sqrt(1.0 + g)
    if target > 1.0:
        raise DegenerateTargetError(
            f"target dX={target:.6g} exceeds the vacuum noise 1; "
            "the trajectory starts below threshold"
        )
    vacuum = StsState.vacuum()
    if target == 1.0:
        return ThresholdResult(
            tau_star=0.0,
            state_at_threshold=vacuum,
            observables_at_threshold=observables_from_state(vacuum),
            delta=delta,
        )
    traj = integrate(vacuum, PumpConfig(g=g), ctrl)
    below = traj.dx <= target
    if not below.any():
        raise ThresholdNotReachedError(target, float(traj.dx[-1]), ctrl.tau_end)
    k = int(below.argmax())
    tau_lo = float(traj.tau_grid[k - 1])
    tau_hi = float(traj.tau_grid[k])
    u0, n0 = float(traj.u[k - 1]), float(traj.n_th[k - 1])

    def probe(tau):
        span = tau - tau_lo
        if span <= 0.0:
            return u0, n0
        n_sub = max(1, int(math.ceil(span / ctrl.dtau - 1e-12)))
        u_arr, n_arr, _ = kernels.sts_evolve(u0, n0, g, span / n_sub, n_sub, n_sub)
        return float(u_arr[-1]), float(n_arr[-1])

    lo, hi = tau_lo, tau_hi
    u_hit, n_hit, tau_star = traj.u[k], traj.n_th[k], tau_hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        u_m, n_m = probe(mid)
        dx_m = _dx_of(u_m, n_m)
        if abs(dx_m - target) <= ROOT_TOL:
            u_hit, n_hit, tau_star = u_m, n_m, mid
            break
        if dx_m > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16 * max(1.0, hi):
            u_hit, n_hit = probe(hi)
            tau_star = hi
            break
    state = StsState(u=float(u_hit), phi=0.0, n_th=float(n_hit))
    return ThresholdResult(
        tau_star=float(tau_star),
        state_at_threshold=state,
        observables_at_threshold=observables_from_state(state),
        delta=delta,
    )
