"""Global solutions of z'' + f(t, z) = 0 by Picard iteration

Rupture solutions with delta > 1 correspond to global solutions of
z'' + f(t, z) = 0 on [0, inf) with z(0) = 0 and z(t)/t -> m.  They are
obtained as fixed points of

    (Phi z)(t) = m t + int_0^t s f(s, z(s)) ds + t int_t^inf f(s, z(s)) ds,

which maps the cone 0 <= z <= 2 m t into itself whenever the
feasibility function

    h(m) = (1/m) int_0^inf g(t, 2 m t) dt

is below 1, g being an increasing majorant of f.  Two kernels are
provided:

* ``EXPONENTIAL_DISK`` (N = 2): f = c e^(-2t) |z+1|^p with
  c = lam (delta - 1), from v(r) = (1-U)^(1-delta) and t = -log r;
* ``POWER_EXTERIOR`` (N >= 3, delta > N-1): f = c (t+1)^(-q) (z+a)^p with
  q = 2(N-1)/(N-2), c = lam (delta-1)/(N-2)^2, from t + 1 = r^(2-N).
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy import integrate, optimize, special

from ..exceptions import EvaluationMismatch, Infeasible, NonConvergence, ParameterError
from .shoot import ProfileKind, RadialProfile

logger = logging.getLogger(__name__)

STEP = 1e-3
T_HORIZON = 40.0
TOL = 1e-12
MAX_ITER = 200


class KernelKind(Enum):
    EXPONENTIAL_DISK = 'ExponentialDisk'
    POWER_EXTERIOR = 'PowerExterior'


@dataclass(frozen=True)
class KernelSpec:
    """Nonlinearity f(t, z) = coefficient * weight(t) * |z + shift|^p

    Attributes
    ----------
    kind : KernelKind
    coefficient : float
    shift : float
    p : float
    dim : int
        Dimension, used by the power weight
    delta : float, optional
        Fringing coefficient the kernel was built from
    """
    kind: KernelKind
    coefficient: float
    shift: float
    p: float
    dim: int = 2
    delta: Optional[float] = None

    def __post_init__(self):
        if not self.coefficient >= 0 or not self.shift >= 1 or not self.p > 1:
            raise ParameterError('kernel needs coefficient >= 0, shift >= 1, p > 1')
        if self.kind is KernelKind.POWER_EXTERIOR:
            if self.dim < 3 or not self.p < self.dim / (self.dim - 2.0):
                raise ParameterError('power kernel needs N >= 3 and p < N/(N-2)')

    @property
    def decay(self):
        """Exponent q of the power weight (t+1)^(-q)"""
        return 2.0 * (self.dim - 1.0) / (self.dim - 2.0)

    def weight(self, t):
        if self.kind is KernelKind.EXPONENTIAL_DISK:
            return np.exp(-2.0 * t)
        return (t + 1.0) ** (-self.decay)

    def f(self, t, z):
        return self.coefficient * self.weight(t) * np.abs(z + self.shift) ** self.p

    def g(self, t, z):
        """Increasing majorant of f on z >= 0"""
        if self.kind is KernelKind.EXPONENTIAL_DISK:
            return 2.0 ** (self.p - 1.0) * self.coefficient * self.weight(t) * (1.0 + z ** self.p)
        return self.f(t, z)

    def with_coefficient(self, coefficient):
        return KernelSpec(self.kind, coefficient, self.shift, self.p, self.dim, self.delta)


@dataclass(frozen=True)
class SlopeInterval:
    m_lo: float
    m_hi: float
    m_best: float
    h_min: float


@dataclass
class PicardSolution:
    """Converged fixed point sampled on a uniform grid

    Attributes
    ----------
    t : ndarray
    z : ndarray
    deviation : ndarray
        z - m t, computed without forming m t
    slope : ndarray
        z'(t)
    m : float
    iterations : int
    cone_ok : bool
        Every iterate stayed inside 0 <= z <= 2 m t
    """
    t: np.ndarray
    z: np.ndarray
    deviation: np.ndarray
    slope: np.ndarray
    m: float
    iterations: int
    cone_ok: bool
    kernel: KernelSpec = field(repr=False)


def disk_kernel(params):
    """Kernel for the disk N = 2 with delta > 1"""
    if params.dim != 2 or not params.delta > 1 or params.lam is None:
        raise ParameterError('disk kernel needs N = 2, delta > 1 and lambda')
    delta = params.delta
    return KernelSpec(KernelKind.EXPONENTIAL_DISK, params.lam * (delta - 1.0), 1.0,
                      (delta + 1.0) / (delta - 1.0), 2, delta)


def exterior_kernel(params):
    """Kernel for N >= 3 with delta > N - 1"""
    N, delta = params.dim, params.delta
    if N < 3 or not delta > N - 1 or params.lam is None:
        raise ParameterError('power kernel needs N >= 3, delta > N-1 and lambda')
    return KernelSpec(KernelKind.POWER_EXTERIOR, params.lam * (delta - 1.0) / (N - 2.0) ** 2, 1.0,
                      (delta + 1.0) / (delta - 1.0), N, delta)


@functools.lru_cache(maxsize=None)
def gamma_constant(p):
    """int_0^inf t^p e^(-2t) dt = Gamma(p+1) / 2^(p+1), with a quadrature check"""
    value = special.gamma(p + 1.0) / 2.0 ** (p + 1.0)
    check, _ = integrate.quad(lambda t: t ** p * math.exp(-2.0 * t), 0.0, np.inf)
    if abs(check - value) > 1e-8 * value:
        raise EvaluationMismatch('gamma constant {} disagrees with quadrature {}'.format(value, check))
    return value


def feasibility(kernel, m):
    """h(m) = (1/m) int_0^inf g(t, 2 m t) dt"""
    c, p = kernel.coefficient, kernel.p
    if kernel.kind is KernelKind.EXPONENTIAL_DISK:
        a = gamma_constant(p)
        return 2.0 ** (p - 2.0) * c / m + 2.0 ** (2.0 * p - 1.0) * c * a * m ** (p - 1.0)
    value, _ = integrate.quad(lambda t: kernel.g(t, 2.0 * m * t), 0.0, np.inf, limit=200)
    return value / m


def _minimize_h(kernel):
    res = optimize.minimize_scalar(lambda s: feasibility(kernel, math.exp(s)), bounds=(-20.0, 20.0),
                                   method='bounded', options={'xatol': 1e-10})
    return math.exp(res.x), float(res.fun)


def feasible_m(kernel):
    """Interval of slopes m with h(m) < 1

    Raises
    ------
    Infeasible
        when min h >= 1
    """
    if kernel.coefficient == 0:
        return SlopeInterval(0.0, math.inf, 1.0, 0.0)
    m_best, h_min = _minimize_h(kernel)
    if h_min >= 1.0:
        raise Infeasible('min h = {:.6g} >= 1 at m = {:.6g}'.format(h_min, m_best))

    def excess(m):
        return feasibility(kernel, m) - 1.0

    lo = m_best
    while excess(lo) < 0:
        lo *= 0.5
    hi = m_best
    while excess(hi) < 0:
        hi *= 2.0
    m_lo = optimize.brentq(excess, lo, m_best, xtol=1e-14, rtol=1e-12)
    m_hi = optimize.brentq(excess, m_best, hi, xtol=1e-14, rtol=1e-12)
    logger.info('%s: h_min=%.6g at m=%.6g, feasible m in (%.6g, %.6g)',
                kernel.kind.value, h_min, m_best, m_lo, m_hi)
    return SlopeInterval(m_lo, m_hi, m_best, h_min)


def constructive_threshold(kernel):
    """Largest voltage for which some slope has h(m) < 1

    h is linear in the coefficient, so for the voltage lam the kernel
    was built from the threshold is lam / min h.
    """
    if kernel.coefficient == 0:
        return math.inf
    _, h_min = _minimize_h(kernel)
    lam = kernel.coefficient / _voltage_factor(kernel)
    return lam / h_min


def _voltage_factor(kernel):
    # coefficient per unit voltage
    if kernel.delta is None:
        return 1.0
    if kernel.kind is KernelKind.EXPONENTIAL_DISK:
        return kernel.delta - 1.0
    return (kernel.delta - 1.0) / (kernel.dim - 2.0) ** 2


def _tail(kernel, T, z_T, slope_T):
    """int_T^inf f(s, z) ds with z continued linearly past T"""
    if kernel.coefficient == 0:
        return 0.0
    value, _ = integrate.quad(lambda s: kernel.f(s, z_T + slope_T * (s - T)), T, np.inf, limit=200)
    return value


def _apply(kernel, t, h, z, m):
    F = kernel.f(t, z)
    panels_tF = 0.5 * h * (t[:-1] * F[:-1] + t[1:] * F[1:])
    panels_F = 0.5 * h * (F[:-1] + F[1:])
    A = np.concatenate(([0.0], np.cumsum(panels_tF)))
    tail = _tail(kernel, t[-1], z[-1], m)
    B = np.concatenate((np.cumsum(panels_F[::-1])[::-1], [0.0])) + tail
    deviation = A + t * B
    return deviation, m + B


def solve(kernel, m, T=T_HORIZON, tol=TOL, step=STEP, max_iter=MAX_ITER):
    """Fixed point of the Picard operator on [0, T]

    Integrals are trapezoidal sums on a uniform grid of spacing
    ``step``; the discrete fixed point then satisfies
    (z[i+1] - 2 z[i] + z[i-1]) / step^2 + f(t[i], z[i]) = 0 exactly.

    Parameters
    ----------
    kernel : KernelSpec
    m : float
        Asymptotic slope, inside the feasible interval
    T : float
    tol : float
        Stop when successive iterates differ by at most tol in sup norm

    Returns
    -------
    PicardSolution
    """
    if not m > 0:
        raise ParameterError('slope m must be positive')
    n = int(round(T / step)) + 1
    t = np.linspace(0.0, T, n)
    h = T / (n - 1)
    deviation = np.zeros_like(t)
    z = m * t
    cone_ok = True
    damping = 1.0
    previous_change = math.inf
    for iteration in range(1, max_iter + 1):
        image, slope = _apply(kernel, t, h, z, m)
        if np.any(image < -1e-14) or np.any(image > m * t + 1e-14):
            cone_ok = False
        new_deviation = deviation + damping * (image - deviation)
        change = float(np.max(np.abs(new_deviation - deviation)))
        if change <= tol:
            # the undamped image satisfies the discrete equation exactly
            logger.debug('Picard converged for m=%.6g in %d iterations', m, iteration)
            return PicardSolution(t, m * t + image, image, slope, m, iteration, cone_ok, kernel)
        deviation = new_deviation
        z = m * t + deviation
        if change > previous_change and damping == 1.0:
            logger.warning('Picard step grew for m=%.6g, damping by 0.5', m)
            damping = 0.5
        previous_change = change
    raise NonConvergence('no convergence for m={} after {} iterations (last change {:.3g})'.format(
        m, max_iter, change))


def ode_residual(kernel, solution):
    """Sup norm of z'' + f(t, z) with z'' by central differences"""
    t, dev = solution.t, solution.deviation
    h = t[1] - t[0]
    second = (dev[2:] - 2.0 * dev[1:-1] + dev[:-2]) / (h * h)
    return float(np.max(np.abs(second + kernel.f(t[1:-1], solution.z[1:-1]))))


def slope_bound(kernel, m, T):
    """Bound on |z(T)/T - m| from the cone estimate"""
    head, _ = integrate.quad(lambda s: s * kernel.g(s, 2.0 * m * s), 0.0, T, limit=200)
    tail, _ = integrate.quad(lambda s: kernel.g(s, 2.0 * m * s), T, np.inf, limit=200)
    return head / T + tail


def to_rupture(kernel, solution, params):
    """Rupture profile U(r) from a converged fixed point

    Parameters
    ----------
    kernel : KernelSpec
    solution : PicardSolution
    params : ProblemParams
        Supplies delta and the voltage

    Returns
    -------
    RadialProfile
    """
    delta = params.delta
    t, z, slope = solution.t, solution.z, solution.slope
    w = z + kernel.shift
    if kernel.kind is KernelKind.EXPONENTIAL_DISK:
        r = np.exp(-t)
        dw_dr = -slope / r
    else:
        N = kernel.dim
        r = (t + 1.0) ** (-1.0 / (N - 2.0))
        dw_dr = slope * (2.0 - N) * r ** (1.0 - N)
    gap = w ** (-1.0 / (delta - 1.0))
    dU = gap / w * dw_dr / (delta - 1.0)
    order = np.argsort(r)
    return RadialProfile(nodes=r[order], U=(1.0 - gap)[order], dU=dU[order], kind=ProfileKind.RUPTURE,
                         lam=params.lam, gap=gap[order])
