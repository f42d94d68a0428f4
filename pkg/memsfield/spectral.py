"""First Dirichlet eigenvalue of the unit ball

mu1 is the square of the first positive zero of the Bessel function
J_nu with nu = N/2 - 1.  Odd dimensions give half-integer orders, for
which J_nu is a spherical Bessel function with a closed trigonometric
form; those are evaluated with :func:`scipy.special.spherical_jn`.
Even dimensions use :func:`scipy.special.jv`.  An ascending power
series serves as the independent second evaluator.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .exceptions import NoZeroFound, ParameterError

logger = logging.getLogger(__name__)

MAX_DIM = 50
SERIES_MAX_ARG = 30.0
ZERO_XTOL = 1e-14


@dataclass(frozen=True)
class Mu1Result:
    N: int
    nu: float
    j_first: float
    mu1: float


def bessel_series(nu, x, rel_tol=1e-18, max_terms=500):
    """Evaluate J_nu(x) by its ascending series

    Parameters
    ----------
    nu : float
        Order, >= 0
    x : float
        Argument in [0, 30]
    """
    if not 0.0 <= x <= SERIES_MAX_ARG:
        raise ParameterError('series evaluator limited to 0 <= x <= {}'.format(SERIES_MAX_ARG))
    if x == 0.0:
        return 1.0 if nu == 0 else 0.0
    half = 0.5 * x
    term = math.exp(nu * math.log(half) - special.gammaln(nu + 1.0))
    total = term
    quarter_sq = half * half
    for k in range(max_terms):
        term *= -quarter_sq / ((k + 1.0) * (k + 1.0 + nu))
        total += term
        if abs(term) < rel_tol * abs(total):
            break
    return total


def _is_half_integer(nu):
    return abs(nu - math.floor(nu) - 0.5) < 1e-12


def bessel_primary(nu, x):
    """Primary evaluator: spherical form for half-integer orders, jv otherwise"""
    if _is_half_integer(nu):
        n = int(round(nu - 0.5))
        return math.sqrt(2.0 * x / math.pi) * special.spherical_jn(n, x)
    return float(special.jv(nu, x))


def first_zero(nu, evaluator=bessel_primary, step=0.5):
    """First positive zero of J_nu

    J_nu is positive on (0, j_first), so the zero is bracketed by
    stepping forward from max(nu, 1/2) until the sign changes, then refined by
    :func:`scipy.optimize.brentq`.
    """
    lo = max(nu, 0.5)
    f_lo = evaluator(nu, lo)
    if f_lo <= 0:
        raise NoZeroFound('J_{} not positive at the start of the bracket scan'.format(nu))
    hi = lo + step
    while evaluator(nu, hi) > 0:
        lo, hi = hi, hi + step
        if hi > nu + 4.0 * nu ** (1.0 / 3.0) + 10.0:
            raise NoZeroFound('no sign change found for J_{}'.format(nu))
    return optimize.brentq(lambda x: evaluator(nu, x), lo, hi, xtol=ZERO_XTOL, rtol=4 * np.finfo(float).eps)


@functools.lru_cache(maxsize=None)
def mu1(N):
    """First Dirichlet eigenvalue of the unit N-ball

    Parameters
    ----------
    N : int
        Dimension, 2 <= N <= 50

    Returns
    -------
    Mu1Result
    """
    if int(N) != N or N < 2 or N > MAX_DIM:
        raise ParameterError('mu1 supports integer 2 <= N <= {}, got {}'.format(MAX_DIM, N))
    nu = 0.5 * N - 1.0
    j = first_zero(nu)
    logger.debug('first zero of J_%g is %.15g', nu, j)
    return Mu1Result(N=int(N), nu=nu, j_first=j, mu1=j * j)


def cross_check(N):
    """Difference between the primary and series zeros of J_{N/2-1}"""
    nu = 0.5 * N - 1.0
    return abs(first_zero(nu) - first_zero(nu, evaluator=bessel_series))
