"""Pure NumPy reference kernels.

Same call signatures as the compiled module squeezecav._kernels_cy; the
active backend is chosen in squeezecav.kernels at import time.
"""

import math
from functools import lru_cache

import numpy as np

# Abort threshold for the squeezing amplitude: beyond this, e^{2u} and the
# thermal photon number leave the double-precision range soon after.
U_MAX = 300.0


def _sts_rhs(u, n, g):
    try:
        c = math.cosh(u)
        s = math.sinh(u)
    except OverflowError:
        # match C behaviour (inf, no exception); the caller's guard aborts
        c = math.inf
        s = math.copysign(math.inf, u)
    return 0.5 * g - c * s / (2.0 * n + 1.0), s * s - n


def sts_evolve(u0, nth0, g, dtau, n_steps, record_every):
    """Fixed-step RK4 for the on-resonance (u, n_th) equations.

    Records the initial point, every record_every-th step and the final
    step.  Returns (u_samples, nth_samples, steps_done); steps_done is
    smaller than n_steps only if the overflow guard |u| > U_MAX tripped,
    in which case the sample arrays are truncated to what was recorded.
    """
    n_steps = int(n_steps)
    record_every = int(record_every)
    n_rec = n_steps // record_every + 1
    if n_steps % record_every:
        n_rec += 1
    u_out = np.empty(n_rec)
    n_out = np.empty(n_rec)
    u_out[0] = u = float(u0)
    n_out[0] = n = float(nth0)
    idx = 1
    for step in range(1, n_steps + 1):
        du1, dn1 = _sts_rhs(u, n, g)
        du2, dn2 = _sts_rhs(u + 0.5 * dtau * du1, n + 0.5 * dtau * dn1, g)
        du3, dn3 = _sts_rhs(u + 0.5 * dtau * du2, n + 0.5 * dtau * dn2, g)
        du4, dn4 = _sts_rhs(u + dtau * du3, n + dtau * dn3, g)
        u += dtau * (du1 + 2.0 * (du2 + du3) + du4) / 6.0
        n += dtau * (dn1 + 2.0 * (dn2 + dn3) + dn4) / 6.0
        if not (abs(u) <= U_MAX) or not math.isfinite(n):
            return u_out[:idx], n_out[:idx], step - 1
        if step % record_every == 0 or step == n_steps:
            u_out[idx] = u
            n_out[idx] = n
            idx += 1
    return u_out[:idx], n_out[:idx], n_steps


@lru_cache(maxsize=8)
def _tables(dim):
    m = np.arange(dim, dtype=float)
    sq1 = np.sqrt(m[1:])                              # sqrt(1..N-1)
    sq2 = np.sqrt((m[:-2] + 1.0) * (m[:-2] + 2.0))    # sqrt((k+1)(k+2))
    gain = np.outer(sq1, sq1)                         # b rho b† weights
    decay = -0.5 * (m[:, None] + m[None, :])          # -(i+j)/2
    return sq2, gain, decay


def lindblad_rhs(rho, g, out=None):
    """One application of the dimensionless Lindblad generator.

    d(rho)/dtau = (g/4) [b^2 - b†^2, rho] + b rho b† - {b†b, rho}/2,
    evaluated with index shifts instead of matrix products (all operators
    involved are within two diagonals of the main one).
    """
    dim = rho.shape[0]
    sq2, gain, decay = _tables(dim)
    if out is None:
        out = np.empty_like(rho)
    np.multiply(decay, rho, out=out)
    out[:-1, :-1] += gain * rho[1:, 1:]
    q = 0.25 * g
    if q != 0.0:
        out[:-2, :] += q * sq2[:, None] * rho[2:, :]
        out[2:, :] -= q * sq2[:, None] * rho[:-2, :]
        out[:, 2:] -= q * rho[:, :-2] * sq2[None, :]
        out[:, :-2] += q * rho[:, 2:] * sq2[None, :]
    return out


def lindblad_evolve(rho, g, dtau, n_steps):
    """Advance rho in place by n_steps fixed RK4 steps. Returns rho."""
    k = np.empty_like(rho)
    acc = np.empty_like(rho)
    tmp = np.empty_like(rho)
    for _ in range(int(n_steps)):
        lindblad_rhs(rho, g, out=k)
        acc[:] = k
        np.multiply(k, 0.5 * dtau, out=tmp)
        tmp += rho
        lindblad_rhs(tmp, g, out=k)
        acc += k
        acc += k
        np.multiply(k, 0.5 * dtau, out=tmp)
        tmp += rho
        lindblad_rhs(tmp, g, out=k)
        acc += k
        acc += k
        np.multiply(k, dtau, out=tmp)
        tmp += rho
        lindblad_rhs(tmp, g, out=k)
        acc += k
        acc *= dtau / 6.0
        rho += acc
    return rho
