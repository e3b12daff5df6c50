"""Equations of motion for the squeezed-thermal-state parameters.

On resonance (pump at twice the cavity frequency, phase-matched) the
dynamics in dimensionless time tau = Gamma*t reduces to two coupled ODEs,

    du/dtau   = g/2 - cosh(u) sinh(u) / (2 n_th + 1)
    dn/dtau   = sinh^2(u) - n_th

with the squeezing phase constant in the interaction picture.  The
general pump envelope adds a phase equation that is singular at u = 0
unless the drive satisfies the resonance condition; both forms are
provided.  Trajectories are integrated with fixed-step classical RK4.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core_model import Trajectory, observable_arrays
from .errors import DomainError, IntegrationOverflowError, SingularPhaseError

# Guard for the 1/(cosh u sinh u) factor in the phase equation.
SINH_EPS = 1e-10

# Relative tolerance of the resonance (purely imaginary drive) test.
RESONANCE_RTOL = 1e-12

# g2 enters the step-halving metric only where <n> is at least this large:
# below it, g2 ~ 1/(2<n>) amplifies machine roundoff between the two runs
# far beyond integrator truncation error (the correlation is 0/0 at vacuum).
G2_CONDITION_FLOOR = 1e-3


@dataclass(frozen=True)
class IntegrationControl:
    """Fixed-step integration settings.

    sample_every decimates the stored output; the initial and terminal
    points are always included.  richardson_check re-runs the integration
    at half the step and stores the largest observed change on the
    trajectory (an RK4 convergence diagnostic).
    """

    tau_end: float
    dtau: float = 1e-3
    sample_every: int = 1
    richardson_check: bool = False

    def __post_init__(self):
        if not (self.dtau > 0.0) or not math.isfinite(self.dtau):
            raise DomainError(f"dtau must be positive and finite, got {self.dtau}")
        if not (self.tau_end >= 0.0) or not math.isfinite(self.tau_end):
            raise DomainError(f"tau_end must be >= 0 and finite, got {self.tau_end}")
        if int(self.sample_every) != self.sample_every or self.sample_every < 1:
            raise DomainError(f"sample_every must be an integer >= 1, got {self.sample_every}")


@dataclass(frozen=True)
class StsDerivative:
    """Rates of change of (u, phi, n_th) per unit tau."""

    du_dtau: float
    dphi_dtau: float
    dnth_dtau: float


def rhs_resonant(u, n_th, g):
    """Resonant rates (du/dtau, dn_th/dtau).

    No singularity: the damping denominator 2 n_th + 1 is >= 1.
    """
    c = math.cosh(u)
    s = math.sinh(u)
    return 0.5 * g - c * s / (2.0 * n_th + 1.0), s * s - n_th


def check_resonance_condition(drive_value, phi):
    """True when Re(drive e^{-i phi}) vanishes (to RESONANCE_RTOL).

    This is the condition under which the phase equation stays finite as
    sinh(u) -> 0; a drive of the form -i * eta * e^{i phi} with real eta
    satisfies it for any phi.
    """
    z = complex(drive_value)
    if z == 0:
        return True
    return abs((z * cmath.exp(-1j * phi)).real) <= RESONANCE_RTOL * abs(z)


def _general_rates(u, phi, n_th, drive_value, omega_over_gamma):
    c = math.cosh(u)
    s = math.sinh(u)
    z = complex(drive_value) * cmath.exp(-1j * phi)
    du = -2.0 * z.imag - c * s / (2.0 * n_th + 1.0)
    dn = s * s - n_th
    if abs(s) <= SINH_EPS:
        if not check_resonance_condition(drive_value, phi):
            raise SingularPhaseError(
                "phase equation singular: sinh(u) ~ 0 with Re(drive e^{-i phi}) != 0"
            )
        dphi = -2.0 * omega_over_gamma
    else:
        dphi = -2.0 * omega_over_gamma + (c * c + s * s) / (c * s) * (2.0 * z.real)
    return du, dphi, dn


def rhs_general(state, drive_value, omega_over_gamma=0.0):
    """General-pump rates for (u, phi, n_th), scaled to tau = Gamma*t.

    drive_value is the instantaneous complex pump envelope in loss-rate
    units.  Raises SingularPhaseError when sinh(u) <= SINH_EPS and the
    resonance condition does not hold.
    """
    du, dphi, dn = _general_rates(
        state.u, state.phi, state.n_th, drive_value, omega_over_gamma
    )
    return StsDerivative(du_dtau=du, dphi_dtau=dphi, dnth_dtau=dn)


def _grid(tau_end, dtau):
    if tau_end == 0.0:
        return 0, dtau
    n_steps = max(1, int(round(tau_end / dtau)))
    return n_steps, tau_end / n_steps


def _recorded_steps(n_steps, every):
    steps = list(range(0, n_steps + 1, every))
    if n_steps % every:
        steps.append(n_steps)
    return np.asarray(steps, dtype=float)


def integrate(initial, pump, ctrl, omega_over_gamma=0.0):
    """Integrate the equations of motion and return a Trajectory.

    With pump.drive unset the reduced resonant equations are used and the
    phase is pump.phi0 throughout (the free -2*omega*t rotation is already
    absorbed in the quadrature definition).  A callable pump.drive selects
    the general equations.

    Raises IntegrationOverflowError (naming the tau reached) if the state
    leaves the representable range, which strong pumping eventually forces.
    """
    n_steps, h = _grid(ctrl.tau_end, ctrl.dtau)
    if pump.drive is None:
        traj = _integrate_resonant(initial, pump, n_steps, h, ctrl.sample_every)
    else:
        traj = _integrate_general(
            initial, pump, n_steps, h, ctrl.sample_every, omega_over_gamma
        )
    if ctrl.richardson_check and n_steps > 0:
        fine = (
            _integrate_resonant(initial, pump, 2 * n_steps, 0.5 * h, 2 * ctrl.sample_every)
            if pump.drive is None
            else _integrate_general(
                initial, pump, 2 * n_steps, 0.5 * h, 2 * ctrl.sample_every, omega_over_gamma
            )
        )
        defect = 0.0
        ok_g2 = (traj.n_mean >= G2_CONDITION_FLOOR) & (fine.n_mean >= G2_CONDITION_FLOOR)
        for name in ("u", "n_th", "dx", "dy", "product", "n_mean", "g2"):
            a = getattr(traj, name)
            b = getattr(fine, name)
            d = np.abs(a - b)
            if name == "g2":
                d = d[ok_g2]
            d = d[np.isfinite(d)]
            if d.size:
                defect = max(defect, float(d.max()))
        traj = Trajectory(
            tau_grid=traj.tau_grid,
            u=traj.u,
            phi=traj.phi,
            n_th=traj.n_th,
            dx=traj.dx,
            dy=traj.dy,
            product=traj.product,
            n_mean=traj.n_mean,
            g2=traj.g2,
            step_halving_error=defect,
        )
    return traj


def _resonant_phase(initial, pump):
    if initial.u == 0.0:
        return pump.phi0
    if abs(math.remainder(initial.phi - pump.phi0, 2.0 * math.pi)) > 1e-12:
        raise DomainError(
            "resonant path needs the pump phase to match the initial squeezing "
            "phase; supply an explicit drive for a misaligned pump"
        )
    return initial.phi


def _integrate_resonant(initial, pump, n_steps, h, every):
    phi0 = _resonant_phase(initial, pump)
    u_arr, n_arr, done = kernels.sts_evolve(
        initial.u, initial.n_th, pump.g, h, n_steps, every
    )
    if done < n_steps:
        raise IntegrationOverflowError(tau_reached=done * h)
    tau = _recorded_steps(n_steps, every) * h
    return _build_trajectory(tau, u_arr, np.full_like(u_arr, phi0), n_arr)


def _integrate_general(initial, pump, n_steps, h, every, omega_over_gamma):
    drive = pump.drive
    u, phi, n = initial.u, initial.phi, initial.n_th
    steps = _recorded_steps(n_steps, every)
    u_out = np.empty(len(steps))
    phi_out = np.empty(len(steps))
    n_out = np.empty(len(steps))
    u_out[0], phi_out[0], n_out[0] = u, phi, n
    idx = 1
    for step in range(1, n_steps + 1):
        tau = (step - 1) * h
        d_0 = complex(drive(tau))
        d_h = complex(drive(tau + 0.5 * h))
        d_1 = complex(drive(tau + h))
        k1 = _general_rates(u, phi, n, d_0, omega_over_gamma)
        k2 = _general_rates(
            u + 0.5 * h * k1[0], phi + 0.5 * h * k1[1], n + 0.5 * h * k1[2],
            d_h, omega_over_gamma,
        )
        k3 = _general_rates(
            u + 0.5 * h * k2[0], phi + 0.5 * h * k2[1], n + 0.5 * h * k2[2],
            d_h, omega_over_gamma,
        )
        k4 = _general_rates(
            u + h * k3[0], phi + h * k3[1], n + h * k3[2], d_1, omega_over_gamma
        )
        u += h * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0]) / 6.0
        phi += h * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1]) / 6.0
        n += h * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2]) / 6.0
        if not (abs(u) <= kernels.U_MAX) or not math.isfinite(n) or not math.isfinite(phi):
            raise IntegrationOverflowError(tau_reached=(step - 1) * h)
        if step % every == 0 or step == n_steps:
            u_out[idx], phi_out[idx], n_out[idx] = u, phi, n
            idx += 1
    return _build_trajectory(steps * h, u_out[:idx], phi_out[:idx], n_out[:idx])


def _build_trajectory(tau, u, phi, n_th):
    dx, dy, product, n_mean, g2_vals = observable_arrays(u, n_th)
    return Trajectory(
        tau_grid=tau,
        u=u,
        phi=phi,
        n_th=n_th,
        dx=dx,
        dy=dy,
        product=product,
        n_mean=n_mean,
        g2=g2_vals,
    )
