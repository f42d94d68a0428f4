"""Singular solutions at the critical exponent p = N/(N-2)

For delta = N - 1 with N >= 3 rupture solutions come from singular
solutions of

    v'' + (N-1)/r v' + v^p = 0,   v(1) = 0,  v'(1) = -alpha,

shot inward from the boundary.  In t = -log r the equation reads

    v_tt = (N-2) v_t - e^(-2t) |v|^(p-1) v,

which is what is integrated.  For small alpha the solution stays
positive and grows like r^(2-N) (log 1/r)^(-(N-2)/2); for large alpha it
turns and crosses zero.  Positive singular solutions are rescaled into
solutions of v'' + (N-1)/r v' + lam v^p = 0 with a prescribed boundary
value.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from ..exceptions import Blowup, LambdaTooLarge, ParameterError

logger = logging.getLogger(__name__)

R_MIN = 1e-6
RTOL = 1e-12
ATOL = 1e-14
SAMPLES_PER_UNIT = 100
FD_STEP = 1e-3
AVILES_RADII = 10.0 ** -np.arange(1, 7)


def critical_power(N):
    if N < 3:
        raise ParameterError('critical exponent needs N >= 3, got {}'.format(N))
    return N / (N - 2.0)


def aviles_limit(N):
    """Limit of v r^(N-2) (log 1/r)^((N-2)/2) along singular solutions"""
    return ((N - 2.0) / math.sqrt(2.0)) ** (N - 2)


@dataclass
class InwardShot:
    """Solution of the unit problem shot inward from r = 1

    Attributes
    ----------
    alpha : float
        Boundary slope magnitude, v'(1) = -alpha
    r_min : float
        Requested smallest radius
    r_end : float
        Smallest radius reached
    radii : ndarray
        Decreasing radii starting at 1
    v, dv : ndarray
        Values and radial derivative; v[0] is exactly 0
    positive, growing : bool
        v > 0 and v increasing towards the center on (r_end, 1)
    turned : bool
        v came back to zero before r_min
    """
    dim: int
    alpha: float
    r_min: float
    r_end: float
    radii: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    positive: bool
    growing: bool
    turned: bool
    dense: Optional[object] = field(default=None, repr=False)

    @property
    def singular_candidate(self):
        return self.positive and self.growing and not self.turned

    def value(self, r):
        """v at radii inside [r_end, 1]"""
        return self.dense(-np.log(r))[0]


@dataclass
class SingularProfile:
    """Solution of v'' + (N-1)/r v' + lam v^p = 0 on [r_end, 1]

    Values are ``scale * w(-log r + offset)`` for the dense solution w of
    the log-radius equation it was built from.
    """
    dim: int
    lam: float
    radii: np.ndarray
    V: np.ndarray
    dV: np.ndarray
    rho: Optional[float] = None
    scale: float = 1.0
    offset: float = 0.0
    dense: Optional[object] = field(default=None, repr=False)

    @property
    def boundary_value(self):
        return float(self.log_state(0.0)[0])

    def log_state(self, T):
        """(V, V_T) at log radius T = -log r"""
        w, w_t = self.dense(np.asarray(T) + self.offset)
        return self.scale * w, self.scale * w_t

    def evaluate(self, r):
        """(V, dV/dr) at radii r"""
        r = np.asarray(r, dtype=float)
        V, V_T = self.log_state(-np.log(r))
        return V, -V_T / r


def _log_rhs(N, lam):
    p = critical_power(N)

    def rhs(t, y):
        v, v_t = y
        return [v_t, (N - 2.0) * v_t - lam * math.exp(-2.0 * t) * abs(v) ** (p - 1.0) * v]
    return rhs


def _integrate(N, lam, t0, t1, y0, stop_at_zero):
    def crossing(t, y):
        return y[0]
    crossing.terminal = True
    crossing.direction = -1

    sol = solve_ivp(_log_rhs(N, lam), (t0, t1), y0, method='DOP853', rtol=RTOL, atol=ATOL,
                    dense_output=True, events=[crossing] if stop_at_zero else None)
    if sol.status == -1:
        raise Blowup('integration stopped at r = {:.6g}: {}'.format(math.exp(-sol.t[-1]), sol.message),
                     last_radius=math.exp(-sol.t[-1]))
    return sol


def _log_grid(t0, t1):
    return np.linspace(t0, t1, max(int(math.ceil((t1 - t0) * SAMPLES_PER_UNIT)), 2) + 1)


def shoot_inward(N, alpha, r_min=R_MIN):
    """Shoot the unit critical problem from r = 1 towards r_min

    Parameters
    ----------
    N : int
        Dimension, >= 3
    alpha : float
        v'(1) = -alpha, alpha > 0
    r_min : float
        Smallest radius, >= 1e-6

    Returns
    -------
    InwardShot

    Raises
    ------
    Blowup
        when the integrator fails before r_min
    """
    critical_power(N)
    if not alpha > 0:
        raise ParameterError('alpha must be positive, got {}'.format(alpha))
    if not R_MIN <= r_min < 1.0:
        raise ParameterError('r_min must lie in [{}, 1), got {}'.format(R_MIN, r_min))
    t_max = -math.log(r_min)
    sol = _integrate(N, 1.0, 0.0, t_max, [0.0, alpha], stop_at_zero=True)
    turned = len(sol.t_events[0]) > 0
    t_end = float(sol.t_events[0][0]) if turned else t_max
    t = _log_grid(0.0, t_end)
    v, v_t = sol.sol(t)
    v[0] = 0.0
    radii = np.exp(-t)
    positive = bool(np.all(v[1:-1] > 0)) if turned else bool(np.all(v[1:] > 0))
    growing = bool(np.all(v_t > 0))
    logger.debug('inward shot N=%d alpha=%g reached r=%.3g (turned=%s)', N, alpha, radii[-1], turned)
    return InwardShot(N, alpha, r_min, float(math.exp(-t_end)), radii, v, -v_t / radii,
                      positive, growing, turned, dense=sol.sol)


def integrate_singular(N, lam, value, slope, r_min=R_MIN, r_start=1.0):
    """Integrate v'' + (N-1)/r v' + lam v^p = 0 inward from r_start

    Parameters
    ----------
    value, slope : float
        v(r_start) and v'(r_start)

    Returns
    -------
    SingularProfile
    """
    critical_power(N)
    if not 0.0 < r_min < r_start:
        raise ParameterError('need 0 < r_min < r_start')
    t0, t1 = -math.log(r_start), -math.log(r_min)
    sol = _integrate(N, lam, t0, t1, [value, -r_start * slope], stop_at_zero=False)
    t = _log_grid(t0, t1)
    V, V_T = sol.sol(t)
    radii = np.exp(-t)
    return SingularProfile(N, lam, radii, V, -V_T / radii, dense=sol.sol)


def rescale_family(shot, lam, a):
    """Rescale a positive singular solution to V(1) = a

    Solves rho^(N-2) v(rho) = lam^((N-2)/2) a for rho between the maximum
    of rho^(N-2) v(rho) and 1, and returns
    V(r) = rho^(N-2) lam^(-(N-2)/2) v(rho r).

    Raises
    ------
    LambdaTooLarge
        when the maximum of rho^(N-2) v(rho) does not reach the target
    """
    N = shot.dim
    if not lam > 0 or not a > 0:
        raise ParameterError('lambda and a must be positive')
    target = lam ** (0.5 * (N - 2)) * a
    F = shot.radii ** (N - 2) * shot.v
    i_max = int(np.argmax(F))
    if F[i_max] <= target:
        raise LambdaTooLarge('max rho^(N-2) v(rho) = {:.6g} does not reach {:.6g}'.format(F[i_max], target))

    def excess(rho):
        return rho ** (N - 2) * shot.value(rho) - target

    rho = brentq(excess, float(shot.radii[i_max]), 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    scale = rho ** (N - 2) * lam ** (-0.5 * (N - 2))
    offset = -math.log(rho)
    t = _log_grid(0.0, -math.log(shot.r_end) - offset)
    w, w_t = shot.dense(t + offset)
    radii = np.exp(-t)
    logger.debug('rescaled alpha=%g to lam=%g, a=%g with rho=%.12g', shot.alpha, lam, a, rho)
    return SingularProfile(N, lam, radii, scale * w, -scale * w_t / radii, rho=rho, scale=scale,
                           offset=offset, dense=shot.dense)


def singular_residual(profile, r_range=(1e-5, 1.0), h=FD_STEP):
    """Largest relative residual of the rescaled equation in log radius

    With T = -log r the equation is V_TT - (N-2) V_T + lam e^(-2T) V^p = 0.
    V_TT is a fourth order central difference of the dense V_T with step
    h, and each residual is divided by the sum of the term magnitudes.
    """
    N, lam = profile.dim, profile.lam
    p = critical_power(N)
    T_lo = max(-math.log(r_range[1]), 0.0) + 2.0 * h
    T_hi = min(-math.log(r_range[0]), -math.log(profile.radii[-1])) - 2.0 * h
    T = np.linspace(T_lo, T_hi, max(int((T_hi - T_lo) * SAMPLES_PER_UNIT), 2))
    V, V_T = profile.log_state(T)
    slopes = [profile.log_state(T + k * h)[1] for k in (-2, -1, 1, 2)]
    V_TT = (slopes[0] - 8.0 * slopes[1] + 8.0 * slopes[2] - slopes[3]) / (12.0 * h)
    source = lam * np.exp(-2.0 * T) * np.abs(V) ** (p - 1.0) * V
    size = np.abs(V_TT) + (N - 2.0) * np.abs(V_T) + np.abs(source)
    return float(np.max(np.abs(V_TT - (N - 2.0) * V_T + source) / size))


def aviles_ratio(shot, radii=AVILES_RADII):
    """v r^(N-2) (log 1/r)^((N-2)/2) at the given radii"""
    N = shot.dim
    r = np.asarray(radii, dtype=float)
    r = r[r >= shot.r_end * (1.0 - 1e-12)]
    return r, shot.value(r) * r ** (N - 2) * np.log(1.0 / r) ** (0.5 * (N - 2))


@dataclass(frozen=True)
class AvilesTrend:
    radii: np.ndarray
    ratios: np.ndarray
    limit: float
    monotone: bool


def aviles_trend(shot, radii=AVILES_RADII):
    """Whether the distance of the ratio to its limit shrinks as r decreases"""
    r, ratios = aviles_ratio(shot, radii)
    limit = aviles_limit(shot.dim)
    distance = np.abs(ratios - limit)
    monotone = bool(np.all(np.diff(distance) <= 0))
    logger.info('Aviles ratios %s towards %.6g (monotone=%s)', np.array2string(ratios, precision=4),
                limit, monotone)
    return AvilesTrend(r, ratios, limit, monotone)


def alpha_star_bracket(N, lo, hi, r_min=R_MIN, iterations=40):
    """Bracket the largest slope that still gives a singular solution

    Parameters
    ----------
    lo, hi : float
        Slopes with a singular candidate at lo and a turning solution at hi

    Returns
    -------
    lo, hi : float
    """
    if not shoot_inward(N, lo, r_min).singular_candidate:
        raise ParameterError('alpha = {} does not give a singular candidate'.format(lo))
    if shoot_inward(N, hi, r_min).singular_candidate:
        raise ParameterError('alpha = {} does not turn'.format(hi))
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if shoot_inward(N, mid, r_min).singular_candidate:
            lo = mid
        else:
            hi = mid
    logger.info('alpha* for N=%d in [%.10g, %.10g]', N, lo, hi)
    return lo, hi
