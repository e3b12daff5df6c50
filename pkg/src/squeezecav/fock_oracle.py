"""Brute-force verification path: full density-matrix evolution in a
truncated Fock basis.

The dimensionless Lindblad master equation

    d(rho)/dtau = (g/4) [b^2 - b†^2, rho] + b rho b† - {b†b, rho}/2

is integrated with the same fixed-step RK4 as the analytic path, so any
disagreement between the two measures the quality of the squeezed-thermal
ansatz (plus truncation), not integrator mismatch.  The generator above is
the pump written with a real pump ratio g and pump phase zero, for which X
(not Y) is the squeezed quadrature.

Everything here is dense NumPy: the problem is a single cavity mode, and
truncations up to a few hundred levels stay cheap.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import kernels
from .core_model import ObservableSet, Trajectory
from .errors import DomainError, SolverError, TruncationError
from .sts_dynamics import _grid, _recorded_steps

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-9
TOP_POPULATION_TOL = 1e-10
G2_PHOTON_FLOOR = 1e-12

DEFAULT_DIM_CAP = 512


@dataclass(frozen=True)
class LadderOperators:
    """Dense single-mode ladder operators on N levels."""

    dim: int
    lowering: np.ndarray     # b
    raising: np.ndarray      # b†
    number: np.ndarray       # b†b
    lower2: np.ndarray       # b^2
    raise2: np.ndarray       # b†^2


def build_operators(dim):
    """Dense b, b†, b†b, b^2, b†^2 on the lowest dim number states."""
    if dim < 2:
        raise DomainError(f"need at least 2 Fock levels, got dim={dim}")
    root = np.sqrt(np.arange(1, dim, dtype=float))
    b = np.diag(root, 1).astype(complex)
    bdag = b.conj().T
    return LadderOperators(
        dim=dim,
        lowering=b,
        raising=bdag,
        number=bdag @ b,
        lower2=b @ b,
        raise2=bdag @ bdag,
    )


class FockDensityMatrix:
    """Truncated density matrix: Hermitian, unit trace, negligible
    population in the top two levels when the truncation is adequate."""

    def __init__(self, entries):
        entries = np.asarray(entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DomainError("density matrix must be square")
        if entries.shape[0] < 2:
            raise DomainError("need at least 2 Fock levels")
        self.entries = np.ascontiguousarray(entries)

    @property
    def dim(self):
        return self.entries.shape[0]

    @classmethod
    def vacuum(cls, dim):
        rho = np.zeros((dim, dim), complex)
        rho[0, 0] = 1.0
        return cls(rho)

    @classmethod
    def thermal(cls, n_th, dim):
        """Bose-Einstein diagonal state, renormalized on the truncated space."""
        if n_th < 0.0:
            raise DomainError(f"thermal occupation must be >= 0, got {n_th}")
        x = n_th / (n_th + 1.0)
        weights = x ** np.arange(dim, dtype=float)
        return cls(np.diag(weights / weights.sum()).astype(complex))

    def trace(self):
        return complex(np.trace(self.entries))

    def hermiticity_defect(self):
        return float(np.abs(self.entries - self.entries.conj().T).max())

    def top_level_population(self):
        """Population of the top two levels (truncation adequacy measure)."""
        return float(np.real(self.entries[-1, -1] + self.entries[-2, -2]))

    def purity(self):
        return float(np.vdot(self.entries, self.entries).real)

    def copy(self):
        return FockDensityMatrix(self.entries.copy())

    def validate(self, check_truncation=True):
        """Raise SolverError on any violated state invariant."""
        herm = self.hermiticity_defect()
        if herm > HERMITICITY_TOL:
            raise SolverError(f"density matrix not Hermitian: defect {herm:.3e}")
        tr_err = abs(self.trace() - 1.0)
        if tr_err > TRACE_TOL:
            raise SolverError(f"density matrix trace off by {tr_err:.3e}")
        if check_truncation:
            pop = self.top_level_population()
            if pop > TOP_POPULATION_TOL:
                raise TruncationError(
                    f"top-level population {pop:.3e} exceeds {TOP_POPULATION_TOL:g}"
                )


def lindblad_rhs(rho, g):
    """d(rho)/dtau for the dimensionless master equation (trace-free)."""
    if g < 0.0:
        raise DomainError(f"pump ratio must be >= 0, got {g}")
    entries = rho.entries if isinstance(rho, FockDensityMatrix) else np.asarray(rho)
    return kernels.lindblad_rhs(np.ascontiguousarray(entries, dtype=complex), g)


def rotated_quadrature_variance(rho, theta):
    """Variance of X_theta = b e^{-i theta} + b† e^{i theta}."""
    entries = rho.entries if isinstance(rho, FockDensityMatrix) else np.asarray(rho)
    dim = entries.shape[0]
    m = np.arange(dim, dtype=float)
    n_mean = float(np.real(m @ np.diag(entries).real))
    tr_b = complex(np.sum(np.sqrt(m[1:]) * np.diag(entries, -1)))
    tr_b2 = complex(np.sum(np.sqrt(m[2:] * (m[2:] - 1.0)) * np.diag(entries, -2)))
    w = complex(math.cos(theta), -math.sin(theta))
    mean = 2.0 * (w * tr_b).real
    second = 2.0 * (w * w * tr_b2).real + 2.0 * n_mean + 1.0
    return max(second - mean * mean, 0.0)


def observables_from_rho(rho):
    """ObservableSet from a Fock-basis state; g2 is None when <n> is
    below G2_PHOTON_FLOOR (the ratio would be 0/0 noise)."""
    entries = rho.entries if isinstance(rho, FockDensityMatrix) else np.asarray(rho)
    dim = entries.shape[0]
    m = np.arange(dim, dtype=float)
    pops = np.diag(entries).real
    n_mean = float(m @ pops)
    tr_b = complex(np.sum(np.sqrt(m[1:]) * np.diag(entries, -1)))
    tr_b2 = complex(np.sum(np.sqrt(m[2:] * (m[2:] - 1.0)) * np.diag(entries, -2)))
    x_mean, y_mean = 2.0 * tr_b.real, 2.0 * tr_b.imag
    x_second = 2.0 * tr_b2.real + 2.0 * n_mean + 1.0
    y_second = -2.0 * tr_b2.real + 2.0 * n_mean + 1.0
    dx = math.sqrt(max(x_second - x_mean * x_mean, 0.0))
    dy = math.sqrt(max(y_second - y_mean * y_mean, 0.0))
    pair_mean = float((m * (m - 1.0)) @ pops)
    g2 = pair_mean / (n_mean * n_mean) if n_mean > G2_PHOTON_FLOOR else None
    return ObservableSet(dx=dx, dy=dy, product=dx * dy, n_mean=n_mean, g2=g2)


def sts_density_matrix(u, phi, n_th, dim):
    """Squeezed thermal state S(xi) rho_T S†(xi) on dim Fock levels.

    The squeeze operator is built by matrix exponential of the
    anti-Hermitian generator (xi* b^2 - xi b†^2)/2; the thermal core is
    the Bose-Einstein diagonal renormalized on the truncated space.
    Raises TruncationError when dim cannot hold the state (thermal tail
    (n_th/(n_th+1))^dim >= 1e-12, stretched noise e^{2u}(2 n_th + 1) over
    dim/2, or a resulting top-level population above tolerance).
    """
    if u < 0.0 or n_th < 0.0:
        raise DomainError("need u >= 0 and n_th >= 0")
    if dim < 2:
        raise DomainError(f"need at least 2 Fock levels, got dim={dim}")
    x = n_th / (n_th + 1.0)
    if x > 0.0 and dim * math.log(x) >= math.log(1e-12):
        raise TruncationError(
            f"thermal tail ratio^dim = {x ** dim:.3e} too heavy at dim={dim}"
        )
    if 2.0 * u + math.log(2.0 * n_th + 1.0) > math.log(dim / 2.0):
        raise TruncationError(
            f"stretched quadrature e^(2u)(2n_th+1) does not fit in dim={dim}"
        )
    ops = build_operators(dim)
    xi = u * complex(math.cos(phi), math.sin(phi))
    squeeze = expm(0.5 * (np.conj(xi) * ops.lower2 - xi * ops.raise2))
    weights = x ** np.arange(dim, dtype=float)
    weights /= weights.sum()
    rho = (squeeze * weights) @ squeeze.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    out = FockDensityMatrix(rho)
    tr_err = abs(out.trace() - 1.0)
    pop = out.top_level_population()
    if tr_err > TRACE_TOL or pop > TOP_POPULATION_TOL:
        raise TruncationError(
            f"constructed state leaks past the truncation at dim={dim} "
            f"(trace error {tr_err:.3e}, top population {pop:.3e})"
        )
    return out


@dataclass(frozen=True)
class FockTrajectory:
    """Sampled master-equation evolution.

    dims records the truncation in use at each sample (it grows when the
    auto-escalation doubles the basis).  states is None unless the run
    was asked to keep full matrices.
    """

    tau_grid: np.ndarray
    observables: list
    dims: np.ndarray
    states: list | None
    final_state: FockDensityMatrix


def _escalate(entries, cap, tau, g):
    dim = entries.shape[0]
    while np.real(entries[-1, -1] + entries[-2, -2]) > TOP_POPULATION_TOL:
        if 2 * dim > cap:
            n_mean = float(np.arange(dim) @ np.diag(entries).real)
            raise TruncationError(
                f"truncation still inadequate at the dim cap {cap} "
                f"(tau={tau:.6g}, <n>={n_mean:.6g}, g={g})",
                tau=tau,
                n_mean=n_mean,
            )
        bigger = np.zeros((2 * dim, 2 * dim), complex)
        bigger[:dim, :dim] = entries
        entries = bigger
        dim *= 2
    return entries


def evolve_rho(rho0, g, tau_end, ctrl, max_dim=DEFAULT_DIM_CAP,
               keep_states=False, on_sample=None):
    """RK4-evolve a density matrix to tau_end on ctrl's step and sample grid.

    At every sample the state is hermitized, its trace checked, and the
    truncation grown (doubling, zero-padded) whenever the top two levels
    hold more than TOP_POPULATION_TOL; past max_dim that raises
    TruncationError naming the tau and photon number reached.  on_sample,
    when given, is called as on_sample(tau, FockDensityMatrix) with a view
    of the live state (copy it if you keep it).

    tau_end is taken from the explicit argument; ctrl contributes the step
    size and sampling stride.
    """
    if g < 0.0:
        raise DomainError(f"pump ratio must be >= 0, got {g}")
    n_steps, h = _grid(tau_end, ctrl.dtau)
    rec = _recorded_steps(n_steps, ctrl.sample_every)
    entries = np.ascontiguousarray(rho0.entries, dtype=complex).copy()
    FockDensityMatrix(entries).validate(check_truncation=False)
    entries = _escalate(entries, max_dim, 0.0, g)

    taus, obs, dims, states = [], [], [], ([] if keep_states else None)

    def record(tau, entries):
        snapshot = FockDensityMatrix(entries)
        taus.append(tau)
        obs.append(observables_from_rho(snapshot))
        dims.append(entries.shape[0])
        if keep_states:
            states.append(snapshot.copy())
        if on_sample is not None:
            on_sample(tau, snapshot)
        return snapshot

    snapshot = record(0.0, entries)
    prev = 0
    for step in rec[1:].astype(int):
        kernels.lindblad_evolve(entries, g, h, step - prev)
        prev = step
        tau = step * h
        entries = 0.5 * (entries + entries.conj().T)
        tr_err = abs(np.trace(entries).real - 1.0)
        if tr_err > TRACE_TOL:
            raise SolverError(
                f"trace drifted by {tr_err:.3e} at tau={tau:.6g}; step too large"
            )
        entries = _escalate(entries, max_dim, tau, g)
        snapshot = record(tau, entries)
    return FockTrajectory(
        tau_grid=np.asarray(taus),
        observables=obs,
        dims=np.asarray(dims, dtype=int),
        states=states,
        final_state=snapshot,
    )


def trace_distance(rho_a, rho_b):
    """(1/2) tr |rho_a - rho_b| via the eigenvalues of the difference."""
    a = rho_a.entries if isinstance(rho_a, FockDensityMatrix) else np.asarray(rho_a)
    b = rho_b.entries if isinstance(rho_b, FockDensityMatrix) else np.asarray(rho_b)
    dim = max(a.shape[0], b.shape[0])
    diff = np.zeros((dim, dim), complex)
    diff[: a.shape[0], : a.shape[0]] = a
    diff[: b.shape[0], : b.shape[0]] -= b
    return 0.5 * float(np.abs(np.linalg.eigvalsh(diff)).sum())


@dataclass(frozen=True)
class DeviationReport:
    """Worst-case analytic-vs-oracle differences over a trajectory.

    g2_dev is None when no sample had the correlation defined on both
    sides.  tau_compared is the last tau actually checked; it is shorter
    than the requested span only when the oracle hit its truncation cap,
    in which case truncation_note carries the reason.
    """

    g: float
    dx_dev: float
    dy_dev: float
    n_mean_dev: float
    g2_dev: float | None
    trace_distance_max: float
    tau_compared: float
    truncation_note: str | None = None


def compare_trajectories(analytic, g, ctrl, fock_dim=64, max_dim=DEFAULT_DIM_CAP,
                         trace_stride=10):
    """Evolve the master equation on analytic's grid and report deviations.

    analytic must be a resonant, pump-phase-zero trajectory produced with
    the same step and sampling settings (the generator implemented by the
    oracle is the phi0 = 0 one).  The trace distance between the evolved
    matrix and the squeezed-thermal reconstruction is evaluated every
    trace_stride-th sample and at the final one.
    """
    if not isinstance(analytic, Trajectory):
        raise DomainError("analytic must be a Trajectory")
    if np.abs(analytic.phi).max() > 1e-12:
        raise DomainError("oracle comparison is defined for pump phase 0")
    n_steps, h = _grid(ctrl.tau_end, ctrl.dtau)
    expect_tau = _recorded_steps(n_steps, ctrl.sample_every) * h
    if len(expect_tau) != len(analytic) or np.abs(expect_tau - analytic.tau_grid).max() > 1e-9:
        raise DomainError("analytic trajectory was not sampled on ctrl's grid")

    rho0 = sts_density_matrix(
        float(analytic.u[0]), 0.0, float(analytic.n_th[0]), fock_dim
    )
    n_samples = len(analytic)
    dev = {"dx": 0.0, "dy": 0.0, "n_mean": 0.0}
    g2_dev = None
    tdist_max = 0.0
    idx = 0

    def on_sample(tau, rho):
        nonlocal g2_dev, tdist_max, idx
        got = observables_from_rho(rho)
        dev["dx"] = max(dev["dx"], abs(got.dx - analytic.dx[idx]))
        dev["dy"] = max(dev["dy"], abs(got.dy - analytic.dy[idx]))
        dev["n_mean"] = max(dev["n_mean"], abs(got.n_mean - analytic.n_mean[idx]))
        ana_g2 = analytic.g2[idx]
        if got.g2 is not None and math.isfinite(ana_g2):
            d = abs(got.g2 - ana_g2)
            g2_dev = d if g2_dev is None else max(g2_dev, d)
        if idx % trace_stride == 0 or idx == n_samples - 1:
            # the reconstruction may need a level or two more headroom than
            # the evolved state right before an escalation triggers
            recon_dim = rho.dim
            while True:
                try:
                    recon = sts_density_matrix(
                        float(analytic.u[idx]), 0.0, float(analytic.n_th[idx]), recon_dim
                    )
                    break
                except TruncationError:
                    if recon_dim >= 2 * max_dim:
                        raise
                    recon_dim *= 2
            tdist_max = max(tdist_max, trace_distance(rho, recon))
        idx += 1

    note = None
    try:
        evolve_rho(
            rho0, g, ctrl.tau_end, ctrl,
            max_dim=max_dim, keep_states=False, on_sample=on_sample,
        )
    except TruncationError as err:
        note = str(err)
    tau_compared = float(analytic.tau_grid[idx - 1]) if idx else 0.0
    return DeviationReport(
        g=g,
        dx_dev=dev["dx"],
        dy_dev=dev["dy"],
        n_mean_dev=dev["n_mean"],
        g2_dev=g2_dev,
        trace_distance_max=tdist_max,
        tau_compared=tau_compared,
        truncation_note=note,
    )
