"""Domain types and closed-form observables for squeezed thermal states.

A squeezed thermal state (STS) is a thermal density matrix conjugated by
the squeeze operator S(xi), xi = u e^{i phi}.  It is fully described by
the squeezing amplitude u >= 0, the squeezing phase phi and the effective
thermal photon number n_th >= 0.

Quadrature normalization
------------------------
Quadratures are scaled so the vacuum has dX = dY = 1, i.e. X = b + b†,
Y = -i(b - b†) and [X, Y] = 2i, giving the uncertainty floor dX*dY >= 1.
Several textbooks use a convention with vacuum noise 1/4 instead; divide
all noise values reported here by 2 to convert.

All functions are pure and operate on immutable value types.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UndefinedCorrelationError

# n_th below this is treated as vacuum: the inverse temperature would be
# larger than meaningful at double precision.
NTH_FLOOR = 1e-12

# Above this squeezing amplitude the photon number leaves the directly
# representable range and g2 is evaluated in log space.
_LOG_DOMAIN_U = 150.0


@dataclass(frozen=True)
class StsState:
    """Squeezed-thermal-state parameters (u, phi, n_th)."""

    u: float
    phi: float = 0.0
    n_th: float = 0.0

    def __post_init__(self):
        if not (self.u >= 0.0):
            raise DomainError(f"squeezing amplitude must be >= 0, got {self.u}")
        if not (self.n_th >= 0.0):
            raise DomainError(f"thermal photon number must be >= 0, got {self.n_th}")
        if not math.isfinite(self.phi):
            raise DomainError(f"squeezing phase must be finite, got {self.phi}")

    @property
    def xi(self):
        """Complex squeezing parameter u e^{i phi}."""
        return self.u * complex(math.cos(self.phi), math.sin(self.phi))

    @classmethod
    def vacuum(cls, phi=0.0):
        return cls(0.0, phi, 0.0)


@dataclass(frozen=True)
class PumpConfig:
    """Pump settings.

    g is the dimensionless real pump-to-loss ratio.  phi0 is the initial
    squeezing phase imposed by the pump.  drive, when given, is a complex
    function of dimensionless time tau representing the pump envelope in
    loss-rate units (gamma*alpha/(hbar*Gamma)); it selects the general,
    not-necessarily-resonant equations of motion.
    """

    g: float
    phi0: float = 0.0
    drive: object = None  # callable tau -> complex, or None

    def __post_init__(self):
        if not (self.g >= 0.0) or not math.isfinite(self.g):
            raise DomainError(f"pump ratio must be finite and >= 0, got {self.g}")
        if self.drive is not None and not callable(self.drive):
            raise DomainError("drive must be callable or None")


@dataclass(frozen=True)
class ObservableSet:
    """Noise and photon statistics of one state at one instant.

    g2 is None where the second-order correlation is undefined (no
    photons, 0/0).
    """

    dx: float
    dy: float
    product: float
    n_mean: float
    g2: float | None = None


def nth_from_beta(beta_hw):
    """Bose occupation 1/(e^{beta_hw} - 1) of the thermal core.

    Parameters
    ----------
    beta_hw : float
        Dimensionless inverse temperature beta*hbar*omega, > 0.
    """
    if not (beta_hw > 0.0):
        raise DomainError(f"beta*hbar*omega must be > 0, got {beta_hw}")
    if beta_hw > 700.0:
        # expm1 overflows; 1/(e^b - 1) = e^{-b} to better than e^{-2b}
        return math.exp(-beta_hw)
    return 1.0 / math.expm1(beta_hw)


def beta_from_nth(n_th):
    """Inverse of nth_from_beta: beta_hw = ln(1 + 1/n_th).

    Raises DomainError for n_th <= NTH_FLOOR; a state that close to
    vacuum has no finite effective temperature.
    """
    if not (n_th > NTH_FLOOR):
        raise DomainError(
            f"n_th must exceed {NTH_FLOOR:g} for a finite temperature, got {n_th}"
        )
    return math.log1p(1.0 / n_th)


def quadrature_variances(state):
    """Variances (dX^2, dY^2) = (2 n_th + 1) e^{-/+ 2u}.

    The squeezed axis is X for phi = 0; for phi != 0 these are the
    variances along the rotated principal axes of the noise ellipse.
    """
    w = 2.0 * state.n_th + 1.0
    return w * math.exp(-2.0 * state.u), w * math.exp(2.0 * state.u)


def uncertainty_product(state):
    """Noise product dX*dY = 2 n_th + 1 (1 for a pure squeezed state)."""
    return 2.0 * state.n_th + 1.0


def mean_photon(state):
    """Total photon number n_th cosh(2u) + sinh^2(u)."""
    s = math.sinh(state.u)
    return state.n_th * math.cosh(2.0 * state.u) + s * s


def svs_mean_photon(state):
    """Photon number sinh^2(u) of the squeezed-vacuum part alone."""
    s = math.sinh(state.u)
    return s * s


def g2(state):
    """Second-order correlation of an STS.

    g2 = 2 + (n_th + 1/2)^2 sinh^2(2u) / <n>^2, always >= 2: squeezed
    thermal light is at least as bunched as thermal light.  Raises
    UndefinedCorrelationError at vacuum where the ratio is 0/0.
    """
    n_mean = mean_photon(state)
    if n_mean == 0.0:
        raise UndefinedCorrelationError("g2 is 0/0 for a state with no photons")
    if state.u <= _LOG_DOMAIN_U:
        # sinh(2u)/n_mean <= ~1/n_th keeps the intermediate in range
        r = math.sinh(2.0 * state.u) / n_mean * (state.n_th + 0.5)
    else:
        r = math.exp(
            math.log(state.n_th + 0.5)
            + _log_sinh(2.0 * state.u)
            - _log_mean_photon(state.u, state.n_th)
        )
    return 2.0 + r * r


def observables_from_state(state):
    """Full ObservableSet of an STS; g2 is None at vacuum.

    dX and dY are evaluated as sqrt(2 n_th + 1) e^{-/+ u}, which stays
    finite over the whole range the integrator allows (u <= 300).
    """
    root_w = math.sqrt(2.0 * state.n_th + 1.0)
    dx = root_w * math.exp(-state.u)
    dy = root_w * math.exp(state.u)
    n_mean = mean_photon(state)
    g2_val = None if n_mean == 0.0 else g2(state)
    return ObservableSet(dx=dx, dy=dy, product=dx * dy, n_mean=n_mean, g2=g2_val)


def _log_sinh(x):
    # valid for x > 0
    return x - math.log(2.0) + math.log1p(-math.exp(-2.0 * x))


def _log_cosh(x):
    return x - math.log(2.0) + math.log1p(math.exp(-2.0 * x))


def _log_mean_photon(u, n_th):
    log_th = math.log(n_th) + _log_cosh(2.0 * u) if n_th > 0.0 else -math.inf
    return np.logaddexp(log_th, 2.0 * _log_sinh(u))


def observable_arrays(u, n_th):
    """Vectorized observables along a trajectory.

    Returns (dx, dy, product, n_mean, g2) arrays; g2 is NaN where
    undefined.  Entries with extreme squeezing are finished in log space
    so g2 stays accurate where n_mean has overflowed to inf.
    """
    u = np.asarray(u, dtype=float)
    n_th = np.asarray(n_th, dtype=float)
    root_w = np.sqrt(2.0 * n_th + 1.0)
    dx = root_w * np.exp(-u)
    dy = root_w * np.exp(u)
    with np.errstate(over="ignore", invalid="ignore"):
        n_mean = n_th * np.cosh(2.0 * u) + np.sinh(u) ** 2
        r = np.sinh(2.0 * u) / n_mean * (n_th + 0.5)
        g2_vals = 2.0 + r * r
    g2_vals = np.where(n_mean == 0.0, np.nan, g2_vals)
    big = u > _LOG_DOMAIN_U
    if np.any(big):
        for i in np.nonzero(big)[0]:
            log_r = (
                math.log(n_th[i] + 0.5)
                + _log_sinh(2.0 * u[i])
                - _log_mean_photon(u[i], n_th[i])
            )
            g2_vals[i] = 2.0 + math.exp(2.0 * log_r)
    return dx, dy, dx * dy, n_mean, g2_vals


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of the equations of motion on a tau = Gamma*t grid.

    All fields are equal-length 1-D arrays; g2 is NaN where undefined.
    dx and dy are measured along the quadrature axes locked to the pump
    phase, so dx < 1 for a phase-matched pump and dx > 1 for one driven
    with the mirrored sign (u < 0 internally; state_at folds that back to
    u >= 0 with the phase advanced by pi).  step_halving_error is filled
    when the integration was run with the Richardson check enabled (max
    change of any sampled quantity when the step is halved).
    """

    tau_grid: np.ndarray
    u: np.ndarray
    phi: np.ndarray
    n_th: np.ndarray
    dx: np.ndarray
    dy: np.ndarray
    product: np.ndarray
    n_mean: np.ndarray
    g2: np.ndarray
    step_halving_error: float | None = None

    def __post_init__(self):
        n = len(self.tau_grid)
        for name in ("u", "phi", "n_th", "dx", "dy", "product", "n_mean", "g2"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"trajectory field {name} has mismatched length")
        if n and np.any(np.diff(self.tau_grid) <= 0.0):
            raise ValueError("tau_grid must be strictly increasing")

    def __len__(self):
        return len(self.tau_grid)

    @property
    def n_svs(self):
        """sinh^2(u): what the photon number would be with no thermal part."""
        return np.sinh(self.u) ** 2

    def state_at(self, i):
        u = float(self.u[i])
        phi = float(self.phi[i])
        if u < 0.0:
            # a sign-flipped pump drives u through zero; (-u, phi+pi) is the
            # same physical state (the flow is equivariant under this mirror)
            u, phi = -u, phi + math.pi
        return StsState(u=u, phi=phi, n_th=float(self.n_th[i]))

    def observables_at(self, i):
        g2_val = float(self.g2[i])
        return ObservableSet(
            dx=float(self.dx[i]),
            dy=float(self.dy[i]),
            product=float(self.product[i]),
            n_mean=float(self.n_mean[i]),
            g2=None if math.isnan(g2_val) else g2_val,
        )

    @property
    def states(self):
        return [self.state_at(i) for i in range(len(self))]

    @property
    def observables(self):
        return [self.observables_at(i) for i in range(len(self))]

    @property
    def final_state(self):
        return self.state_at(len(self) - 1)
