"""Shooting on the scaled radial equation

With s = sqrt(lam) r the voltage drops out of the radial equation and
the scaled profile solves

    U_ss + (N-1)/s U_s + (1 + delta U_s^2) / (1 - U) = 0,  U(0) = alpha.

The first zero s0 of the scaled profile gives lam = s0^2 and the
profile on the unit ball is U(r) = U(s0 r).  Close to alpha = 1 the
same scaling is applied to the transformed equation of the active
branch, see :mod:`memsfield.transforms`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

from .. import spectral
from ..exceptions import EvaluationMismatch, NoZeroFound, ParameterError, SingularityHit
from ..model import thresholds
from ..transforms import TransformKind, nonlinearity, transformed_problem

logger = logging.getLogger(__name__)

# sigma^2 W^(p-1) level, in units of ((N-2)/2)^2, past which the critical tail
# is integrated on the zero energy level
CRITICAL_TAIL_LEVEL = 1.0


class ProfileKind(Enum):
    REGULAR = 'regular'
    RUPTURE = 'rupture'


@dataclass(frozen=True)
class IntegratorControls:
    """Settings shared by the radial integrators

    Attributes
    ----------
    method : str
        Integrator passed to :func:`scipy.integrate.solve_ivp`
    rtol, atol : float
        Integrator tolerances
    h0 : float
        Length of the Taylor start step, relative to the length scale of
        the profile near the origin
    alpha_switch : float
        Center values above this are shot through the transformed problem
    switch_band : float
        Center values this close to ``alpha_switch`` are shot both ways
    switch_rtol : float
        Largest relative difference of the two voltages inside the band
    eps_singular : float
        Center values closer than this to 1 are refused by the direct method
    eps_rupture : float
        Rupture profiles must come within this of 1 at their smallest node
    n_nodes : int
        Number of profile samples
    s_max_factor : float
        Give-up horizon in units of sqrt(N + lambda_upper)
    """
    method: str = 'RK45'
    rtol: float = 1e-10
    atol: float = 1e-12
    h0: float = 1e-4
    alpha_switch: float = 0.99
    switch_band: float = 0.005
    switch_rtol: float = 1e-4
    eps_singular: float = 1e-10
    eps_rupture: float = 1e-3
    n_nodes: int = 401
    s_max_factor: float = 10.0


DEFAULT_CONTROLS = IntegratorControls()


@dataclass
class RadialProfile:
    """Sampled radial solution

    Attributes
    ----------
    nodes : ndarray
        Increasing radii in (0, 1]
    U, dU : ndarray
        Profile values and radial derivative at the nodes
    kind : ProfileKind
    lam : float
        Voltage the profile solves the equation for
    alpha : float, optional
        Center value, None for rupture profiles
    gap : ndarray, optional
        1 - U when it is known more accurately than by subtraction
    """
    nodes: np.ndarray
    U: np.ndarray
    dU: np.ndarray
    kind: ProfileKind
    lam: float
    alpha: Optional[float] = None
    gap: Optional[np.ndarray] = field(default=None, repr=False)

    def one_minus_U(self):
        if self.gap is not None:
            return self.gap
        return 1.0 - self.U

    def check(self, boundary_tol=1e-8, eps_rupture=DEFAULT_CONTROLS.eps_rupture):
        """List of violated profile properties (empty when consistent)"""
        problems = []
        if np.any(np.diff(self.nodes) <= 0) or self.nodes[0] <= 0 or self.nodes[-1] > 1.0:
            problems.append('nodes must increase inside (0, 1]')
        if abs(self.U[-1]) > boundary_tol:
            problems.append('|U(1)| = {:.3g} exceeds {:.1g}'.format(abs(self.U[-1]), boundary_tol))
        if self.kind is ProfileKind.REGULAR and np.max(self.U) >= 1.0:
            problems.append('regular profile reaches 1')
        if self.kind is ProfileKind.RUPTURE and self.one_minus_U()[0] >= eps_rupture:
            problems.append('rupture profile ends {:.3g} below 1'.format(self.one_minus_U()[0]))
        return problems

    def to_frame(self):
        """DataFrame with columns r, U, dU"""
        return pd.DataFrame({'r': self.nodes, 'U': self.U, 'dU': self.dU})


@dataclass
class ShotResult:
    s0: float
    lam: float
    profile: RadialProfile


def _give_up_horizon(params, factor, lambda_factor=1.0):
    lam_upper = thresholds(params, spectral.mu1(params.dim).mu1).lambda_upper
    return factor * math.sqrt(params.dim + lambda_factor * lam_upper)


def _taylor_coefficients(N, kind, p, center):
    """a, b in u = center + a s^2 + b s^4 for u'' + (N-1)/s u' + g(u) = 0"""
    g, dg = nonlinearity(kind, p)
    a = -g(center) / (2.0 * N)
    return a, -dg(center) * a / (4.0 * N + 8.0)


def _taylor_start(center, a, b, h):
    return [center + a * h * h + b * h ** 4, 2.0 * a * h + 4.0 * b * h ** 3]


def _start_length(h0, drop, a):
    # length over which the quadratic term changes the state by `drop`
    return h0 * min(1.0, math.sqrt(drop / abs(a)))


def _sample_nodes(h, s0, n_nodes):
    half = n_nodes // 2
    s = np.union1d(np.geomspace(h, s0, half)[:-1], np.linspace(h, s0, n_nodes - half)[:-1])
    return np.append(s[s < s0], s0)


def _run(rhs, y0, span, events, controls, atol=None):
    """Integrate until the first terminal event

    Returns
    -------
    sol : OdeResult
    fired : int
        Index of the event that stopped the integration
    """
    for event in events:
        event.terminal = True
    sol = solve_ivp(rhs, span, y0, method=controls.method, rtol=controls.rtol,
                    atol=controls.atol if atol is None else atol, dense_output=True, events=events)
    if sol.status == -1:
        raise NoZeroFound('integration failed before reaching zero: {}'.format(sol.message))
    fired = [i for i, times in enumerate(sol.t_events) if len(times)]
    if not fired:
        raise NoZeroFound('no zero of the scaled profile before {:.6g}'.format(span[1]))
    return sol, fired[0]


def integrate_scaled(params, alpha, controls=DEFAULT_CONTROLS):
    """Shoot the direct scaled equation from center value alpha

    Parameters
    ----------
    params : ProblemParams
    alpha : float
        Center value U(0), 0 < alpha < 1
    controls : IntegratorControls

    Returns
    -------
    ShotResult
    """
    if not 0.0 < alpha < 1.0:
        raise ParameterError('alpha must lie in (0, 1), got {}'.format(alpha))
    gap0 = 1.0 - alpha
    if gap0 < controls.eps_singular:
        raise SingularityHit('alpha = {} too close to 1 for the direct method'.format(alpha))
    N, delta = params.dim, params.delta

    a = -1.0 / (2.0 * N * gap0)
    b = -(4.0 * delta * a * a / gap0 + a / gap0 ** 2) / (4.0 * N + 8.0)
    h = _start_length(controls.h0, min(gap0, alpha), a)

    def rhs(s, y):
        U, V = y
        return [V, -(N - 1) / s * V - (1.0 + delta * V * V) / (1.0 - U)]

    def crossing(s, y):
        return y[0]
    crossing.direction = -1

    s_max = _give_up_horizon(params, controls.s_max_factor)
    sol, _ = _run(rhs, _taylor_start(alpha, a, b, h), (h, s_max), [crossing], controls)
    if np.max(sol.y[0]) >= 1.0 - controls.eps_singular:
        raise SingularityHit('profile reached 1 - {:.1g}'.format(controls.eps_singular))
    s0 = float(sol.t_events[0][0])

    s = _sample_nodes(h, s0, controls.n_nodes)
    U, U_s = sol.sol(s)
    U[-1], U_s[-1] = 0.0, sol.y_events[0][0][1]
    profile = RadialProfile(nodes=s / s0, U=U, dU=U_s * s0, kind=ProfileKind.REGULAR,
                            lam=s0 * s0, alpha=alpha)
    logger.debug('direct shot N=%d delta=%g alpha=%.12g: s0=%.15g', N, delta, alpha, s0)
    return ShotResult(s0=s0, lam=s0 * s0, profile=profile)


def _shoot_in_s(params, alpha, problem, controls):
    # exponential and MEMS branches, integrated in s
    N, delta = params.dim, params.delta
    a, b = _taylor_coefficients(N, problem.kind, problem.p, problem.center_value)

    if problem.kind is TransformKind.EXPONENTIAL:
        center = problem.center_value
        drop = min(1.0, center)

        def rhs(s, y):
            return [y[1], -(N - 1) / s * y[1] - math.exp(y[0])]

        def crossing(s, y):
            return y[0]
        crossing.direction = -1

        def back(state, slope):
            gap = np.exp(-0.5 * state)
            return gap, 0.5 * gap * slope

    else:
        # q = 1 - u, q'' + (N-1)/s q' = q^(-p)
        p = problem.p
        center = math.exp((1.0 - delta) * math.log1p(-alpha))
        a, b = -a, -b
        drop = min(center, 1.0 - center)

        def rhs(s, y):
            return [y[1], -(N - 1) / s * y[1] + abs(y[0]) ** (-p)]

        def crossing(s, y):
            return y[0] - 1.0
        crossing.direction = 1

        def back(state, slope):
            gap = state ** (1.0 / (1.0 - delta))
            return gap, -gap / state * slope / (1.0 - delta)

    h = _start_length(controls.h0, drop, a)
    s_max = _give_up_horizon(params, controls.s_max_factor, problem.lambda_factor)
    sol, _ = _run(rhs, _taylor_start(center, a, b, h), (h, s_max), [crossing], controls)
    s0 = float(sol.t_events[0][0])

    s = _sample_nodes(h, s0, controls.n_nodes)
    state, slope = sol.sol(s)
    state[-1], slope[-1] = sol.y_events[0][0]
    gap, U_s = back(state, slope)
    gap[-1] = 1.0
    U = 1.0 - gap
    lam = s0 * s0 / problem.lambda_factor
    profile = RadialProfile(nodes=s / s0, U=U, dU=U_s * s0, kind=ProfileKind.REGULAR,
                            lam=lam, alpha=alpha, gap=gap)
    return s0, lam, profile


def _shoot_superlinear(params, alpha, problem, controls):
    """Superlinear branch in normalized form

    With w = u + 1 and c = w(0), W(sigma) = w(s)/c, sigma = c^((p-1)/2) s
    solves W'' + (N-1)/sigma W' + W^p = 0 with W(0) = 1, and the boundary
    is where W drops to 1/c = (1-alpha)^(delta-1).  Since
    (delta-1)(p-1) = 2, s0 = (1-alpha) sigma0.  The equation is integrated
    in t = log sigma,

        W_tt + (N-2) W_t + e^(2t) W^p = 0,

    with an absolute tolerance below the target level, so the error
    control is relative down to the boundary.

    At p = (N+2)/(N-2) the decaying tail is unstable in any form of the
    second order equation.  There phi = sigma^((N-2)/2) W conserves
    phi_t^2/2 - c2 phi^2/2 + phi^(p+1)/(p+1), c2 = ((N-2)/2)^2, and
    regular solutions sit on its zero level.  Past the maximum of
    sigma^2 W^(p-1) the tail is integrated from that first integral,

        (log W)_t = -(N-2)/2 - sqrt(c2 - 2/(p+1) e^(2t) W^(p-1)).
    """
    N, delta, p = params.dim, params.delta, problem.p
    log_gap0 = math.log1p(-alpha)
    log_level = (delta - 1.0) * log_gap0
    level = math.exp(log_level)
    critical = params.is_half_dim

    a, b = _taylor_coefficients(N, problem.kind, p, 0.0)
    h = _start_length(controls.h0, min(1.0, 1.0 - level), a)
    W0, dW0 = _taylor_start(1.0, a, b, h)
    s_max = _give_up_horizon(params, controls.s_max_factor, problem.lambda_factor)
    t_max = math.log(s_max) - log_gap0

    def rhs(t, y):
        W, W_t = y
        return [W_t, -(N - 2) * W_t - math.exp(2.0 * t) * abs(W) ** (p - 1.0) * W]

    def crossing(t, y):
        return y[0] - level
    crossing.direction = -1

    c = 0.5 * (N - 2)
    kappa = 2.0 / (p + 1.0)

    def tail_start(t, y):
        return math.exp(2.0 * t) * abs(y[0]) ** (p - 1.0) - CRITICAL_TAIL_LEVEL * c * c
    tail_start.direction = -1

    def tail_slope(t, log_W):
        return -c - np.sqrt(np.maximum(c * c - kappa * np.exp(2.0 * t + (p - 1.0) * log_W), 0.0))

    events = [crossing, tail_start] if critical else [crossing]
    head, fired = _run(rhs, [W0, h * dW0], (math.log(h), t_max), events, controls,
                       atol=controls.atol * level)
    tail = None
    if fired == 0:
        t_hit = float(head.t_events[0][0])
        W_hit, W_t_hit = head.y_events[0][0]
        slope_hit = W_t_hit / W_hit
        t_split = t_hit
    else:
        t_split = float(head.t_events[1][0])

        def tail_rhs(t, y):
            return [float(tail_slope(t, y[0]))]

        def tail_crossing(t, y):
            return y[0] - log_level
        tail_crossing.direction = -1

        tail, _ = _run(tail_rhs, [math.log(head.y_events[1][0][0])], (t_split, t_max), [tail_crossing],
                       controls)
        t_hit = float(tail.t_events[0][0])
        slope_hit = float(tail_slope(t_hit, log_level))

    sigma0 = math.exp(t_hit)
    t = np.log(_sample_nodes(h, sigma0, controls.n_nodes))
    t[-1] = t_hit
    log_W = np.empty_like(t)
    dlog_W = np.empty_like(t)
    inner = t <= t_split if tail is not None else np.ones(len(t), dtype=bool)
    W, W_t = head.sol(t[inner])
    W = np.maximum(W, level)
    log_W[inner], dlog_W[inner] = np.log(W), W_t / W
    if tail is not None:
        log_W[~inner] = tail.sol(t[~inner])[0]
        dlog_W[~inner] = tail_slope(t[~inner], log_W[~inner])
    log_W[-1], dlog_W[-1] = log_level, slope_hit

    exponent = log_gap0 - log_W / (delta - 1.0)
    gap = np.exp(exponent)
    U = -np.expm1(exponent)
    gap[-1], U[-1] = 1.0, 0.0
    r = np.exp(t - t_hit)
    r[-1] = 1.0
    s0 = math.exp(t_hit + log_gap0)
    lam = s0 * s0 / problem.lambda_factor
    profile = RadialProfile(nodes=r, U=U, dU=gap * dlog_W / ((delta - 1.0) * r), kind=ProfileKind.REGULAR,
                            lam=lam, alpha=alpha, gap=gap)
    return s0, lam, profile


def integrate_transformed(params, alpha, controls=DEFAULT_CONTROLS):
    """Shoot the transformed equation of the active branch

    The MEMS branch is integrated in q = 1 - u, the exponential branch in
    u and the superlinear branch in normalized form (see
    :func:`_shoot_superlinear`), so the tolerances act on the quantity
    that becomes small (large) as alpha approaches 1.  The Taylor start
    comes from :func:`memsfield.transforms.nonlinearity`.

    Parameters
    ----------
    params : ProblemParams
    alpha : float
        Center value U(0), 0 < alpha < 1
    controls : IntegratorControls

    Returns
    -------
    ShotResult
    """
    if not 0.0 < alpha < 1.0:
        raise ParameterError('alpha must lie in (0, 1), got {}'.format(alpha))
    problem = transformed_problem(params.delta, alpha)
    if problem.kind is TransformKind.SUPERLINEAR_POWER:
        s0, lam, profile = _shoot_superlinear(params, alpha, problem, controls)
    else:
        s0, lam, profile = _shoot_in_s(params, alpha, problem, controls)
    logger.debug('%s shot N=%d delta=%g alpha=%.12g: s0=%.15g', problem.kind.value, params.dim,
                 params.delta, alpha, s0)
    return ShotResult(s0=s0, lam=lam, profile=profile)


def shoot(params, alpha, controls=DEFAULT_CONTROLS):
    """Shot for center value alpha, routed by ``controls.alpha_switch``

    Inside ``controls.switch_band`` around the switch both methods run and
    must agree to ``controls.switch_rtol``.

    Raises
    ------
    EvaluationMismatch
        when the direct and transformed voltages disagree near the switch
    """
    if abs(alpha - controls.alpha_switch) > controls.switch_band:
        if alpha > controls.alpha_switch:
            return integrate_transformed(params, alpha, controls)
        return integrate_scaled(params, alpha, controls)
    direct = integrate_scaled(params, alpha, controls)
    transformed = integrate_transformed(params, alpha, controls)
    if abs(direct.lam - transformed.lam) > controls.switch_rtol * transformed.lam:
        raise EvaluationMismatch('alpha={:.12g}: direct lambda {:.12g}, transformed {:.12g}'.format(
            alpha, direct.lam, transformed.lam))
    return transformed if alpha > controls.alpha_switch else direct


def lambda_of_alpha(params, alpha, controls=DEFAULT_CONTROLS):
    """Voltage lam(alpha) on the bifurcation curve"""
    return shoot(params, alpha, controls).lam


def residual(profile, params):
    """Maximum residual of the radial equation over interior nodes

    U'' is taken by central differences of the supplied dU.  When the
    profile carries an exact gap 1 - U it is used in the denominator.

    Parameters
    ----------
    profile : RadialProfile
    params : ProblemParams
        Dimension and delta; the voltage is taken from the profile

    Returns
    -------
    float
    """
    r, dU = profile.nodes, profile.dU
    if len(r) < 3:
        raise ParameterError('at least three nodes are needed for the residual')
    N, delta, lam = params.dim, params.delta, profile.lam
    gap = profile.one_minus_U()
    ddU = (dU[2:] - dU[:-2]) / (r[2:] - r[:-2])
    ri, dUi = r[1:-1], dU[1:-1]
    res = ddU + (N - 1) / ri * dUi + (lam + delta * dUi * dUi) / gap[1:-1]
    return float(np.max(np.abs(res)))
