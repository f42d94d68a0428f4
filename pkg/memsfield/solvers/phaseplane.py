"""Phase-plane construction of rupture solutions

For N/2 <= delta < N-1 the substitution

    v(r) = (delta-1)^((delta-1)/2) (1-U(r))^(-(delta-1)),
    x(t) = v(r) / {(delta-1)(N-1-delta)/lam}^((delta-1)/2) * r^(delta-1),
    t = -log r

turns the radial equation into the autonomous system

    x' = y,   y' = (N - 2 delta) y + k (x - x^p),   k = (delta-1)(N-1-delta)

with p = (delta+1)/(delta-1).  The energy

    E(x, y) = y^2/2 - k (x^2/2 - x^(p+1)/(p+1))

satisfies dE/dt = -(2 delta - N) y^2, so for delta > N/2 orbits starting
in Omega = {x > 0, E < 0} spiral into (1, 0) and give rupture solutions
with 1 - U ~ sqrt(lam/(N-1-delta)) r; for delta = N/2 they are periodic.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from ..exceptions import InitialDataOutsideOmega, IntegrationFailed, ParameterError, PreconditionViolated
from .shoot import ProfileKind, RadialProfile

logger = logging.getLogger(__name__)

T_HORIZON = 40.0
RTOL = 1e-11
ATOL = 1e-13
SAMPLES_PER_UNIT = 100
CONVERGENCE_TOL = 1e-4


@dataclass(frozen=True)
class PhaseState:
    t: float
    x: float
    y: float


@dataclass
class OrbitTrace:
    """Sampled phase-plane orbit

    Attributes
    ----------
    t, x, y : ndarray
    energies : ndarray
    omega_mask : ndarray of bool
        Membership of each sample in Omega
    """
    dim: int
    delta: float
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    energies: np.ndarray
    omega_mask: np.ndarray
    dense: Optional[object] = field(default=None, repr=False)

    @property
    def states(self):
        return [PhaseState(float(t), float(x), float(y)) for t, x, y in zip(self.t, self.x, self.y)]

    @property
    def in_omega(self):
        return bool(self.omega_mask[-1])


@dataclass(frozen=True)
class OrbitDiagnostics:
    max_energy_increase: float
    converged_to_1: bool
    period_estimate: Optional[float]
    c0: float
    closure: Optional[float]


def _check_range(N, delta):
    if N < 3 or not 0.5 * N <= delta < N - 1:
        raise ParameterError('phase plane needs N >= 3 and N/2 <= delta < N-1, got N={}, delta={}'.format(N, delta))


def _coupling(N, delta):
    return (delta - 1.0) * (N - 1.0 - delta), (delta + 1.0) / (delta - 1.0)


def vector_field(state, N, delta):
    """Right-hand side (dx, dy) of the autonomous system at (x, y)"""
    x, y = state
    k, p = _coupling(N, delta)
    return y, (N - 2.0 * delta) * y + k * (x - x ** p)


def energy(state, N, delta):
    """Lyapunov energy E(x, y)"""
    x, y = state
    k, p = _coupling(N, delta)
    return 0.5 * y * y - k * (0.5 * x * x - x ** (p + 1.0) / (p + 1.0))


def in_omega(state, N, delta):
    return state[0] > 0 and energy(state, N, delta) < 0


def x_delta(delta):
    """Positive zero of x^2/2 - x^(p+1)/(p+1)"""
    return (delta / (delta - 1.0)) ** (0.5 * (delta - 1.0))


def y_bound(x, N, delta):
    """Largest |y| with (x, y) in the closure of Omega"""
    k, p = _coupling(N, delta)
    inner = 0.5 * x * x - x ** (p + 1.0) / (p + 1.0)
    return math.sqrt(max(2.0 * k * inner, 0.0))


def starting_point(N, delta, lam):
    """x(0) matching the boundary condition U(1) = 0"""
    return (lam / (N - 1.0 - delta)) ** (0.5 * (delta - 1.0))


def integrate_orbit(N, delta, x0, y0, T=T_HORIZON, rtol=RTOL, atol=ATOL):
    """Integrate the autonomous system from (x0, y0) over [0, T]

    Returns
    -------
    OrbitTrace
    """
    _check_range(N, delta)
    k, p = _coupling(N, delta)
    damping = N - 2.0 * delta

    def rhs(t, z):
        x, y = z
        return [y, damping * y + k * (x - abs(x) ** p)]

    t_eval = np.linspace(0.0, T, int(round(T * SAMPLES_PER_UNIT)) + 1)
    sol = solve_ivp(rhs, (0.0, T), [x0, y0], method='RK45', rtol=rtol, atol=atol,
                    t_eval=t_eval, dense_output=True)
    if sol.status != 0:
        raise IntegrationFailed('orbit integration failed: {}'.format(sol.message))
    x, y = sol.y
    E = energy((x, y), N, delta)
    mask = (x > 0) & (E < 0)
    return OrbitTrace(N, delta, sol.t, x, y, E, mask, dense=sol.sol)


def orbit_to_profile(trace, lam):
    """Map an orbit back to a rupture profile on r in [exp(-T), 1]"""
    N, delta = trace.dim, trace.delta
    scale = math.sqrt(lam / (N - 1.0 - delta))
    r = np.exp(-trace.t)[::-1]
    x = trace.x[::-1]
    y = trace.y[::-1]
    x_pow = x ** (-1.0 / (delta - 1.0))
    gap = scale * x_pow * r
    dgap = scale * x_pow * (1.0 + y / ((delta - 1.0) * x))
    U = 1.0 - gap
    return RadialProfile(nodes=r, U=U, dU=-dgap, kind=ProfileKind.RUPTURE, lam=lam, gap=gap)


def construct_rupture(N, delta, lam, y0=0.0, T=T_HORIZON):
    """Rupture solution from the phase-plane orbit starting at (x(0), y0)

    Parameters
    ----------
    N : int
        Dimension, >= 3
    delta : float
        N/2 <= delta < N-1
    lam : float
        0 < lam < lam***
    y0 : float
        Initial slope, |y0| < y_bound(x(0))
    T : float
        Horizon in t = -log r

    Returns
    -------
    profile : RadialProfile
    trace : OrbitTrace
    """
    _check_range(N, delta)
    lam3 = delta * (N - 1.0 - delta) / (delta - 1.0)
    if not 0.0 < lam < lam3:
        raise PreconditionViolated('construction needs 0 < lambda < {:.10g}, got {}'.format(lam3, lam))
    x0 = starting_point(N, delta, lam)
    if not in_omega((x0, y0), N, delta):
        raise InitialDataOutsideOmega('E(x0, y0) = {:.6g} >= 0 for x0={:.6g}, y0={}'.format(
            energy((x0, y0), N, delta), x0, y0))
    trace = integrate_orbit(N, delta, x0, y0, T=T)
    logger.debug('orbit N=%d delta=%g lam=%g y0=%g ends at x=%.12g', N, delta, lam, y0, trace.x[-1])
    return orbit_to_profile(trace, lam), trace


def rupture_family(N, delta, lam, y0_values, T=T_HORIZON):
    """Profiles for several initial slopes"""
    return [construct_rupture(N, delta, lam, y0, T)[0] for y0 in y0_values]


def _section_crossings(trace):
    """Times and x values where y changes sign from + to -"""
    N, delta = trace.dim, trace.delta
    _, dy = vector_field((trace.x, trace.y), N, delta)
    idx = np.nonzero((trace.y[:-1] > 0) & (trace.y[1:] <= 0))[0]
    y_spline = CubicHermiteSpline(trace.t, trace.y, dy)
    x_spline = CubicHermiteSpline(trace.t, trace.x, trace.y)
    times = np.array([brentq(y_spline, trace.t[i], trace.t[i + 1], xtol=1e-14) for i in idx])
    return times, x_spline(times)


def orbit_diagnostics(trace):
    """Energy, convergence and periodicity diagnostics of an orbit

    Returns
    -------
    OrbitDiagnostics
        ``closure`` is the largest change of x between successive returns
        to the section y = 0 and is only set for delta = N/2.
    """
    N, delta = trace.dim, trace.delta
    increase = float(max(np.max(np.diff(trace.energies)), 0.0))
    converged = abs(trace.x[-1] - 1.0) <= CONVERGENCE_TOL
    period = closure = None
    c0 = float(np.min(trace.x))
    if abs(delta - 0.5 * N) < 1e-12:
        times, xs = _section_crossings(trace)
        if len(times) >= 2:
            period = float(np.mean(np.diff(times)))
            closure = float(np.max(np.abs(np.diff(xs))))
            window = (trace.t >= times[0]) & (trace.t <= times[0] + period)
            c0 = float(np.min(trace.x[window]))
    return OrbitDiagnostics(increase, bool(converged), period, c0, closure)


def rupture_constant(profile, N):
    """Largest ratio (1 - U) / (sqrt(2 lam / N) r) over the profile"""
    ratio = profile.one_minus_U() / (math.sqrt(2.0 * profile.lam / N) * profile.nodes)
    return float(np.max(ratio)), float(np.min(ratio))
