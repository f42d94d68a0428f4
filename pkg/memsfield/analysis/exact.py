"""Closed-form solution families

Three families are known explicitly:

* the rupture line U = 1 - r with lam = N - 1 - delta,
* the parabolas U = alpha (1 - r^2) with lam = 2 N alpha (1 - alpha),
  which are all regular solutions when delta = N/2,
* a two-parameter rupture family in the plane (N = 2, delta = 1) coming
  from singular solutions of the Liouville equation Delta v + e^v = 0.

Profiles are produced from the formulas with analytic derivatives and
an exactly evaluated gap 1 - U, so they can be used as references for
the integrators.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict

import numpy as np
from scipy import optimize

from ..exceptions import ParameterError
from ..model import UNIT_TOL, ProblemParams
from ..solvers.shoot import ProfileKind, RadialProfile

logger = logging.getLogger(__name__)

DEFAULT_NODES = np.geomspace(1e-6, 1.0, 2001)


class Family(Enum):
    RUPTURE_LINE = 'RuptureLine'
    PARABOLA = 'Parabola'
    LIOUVILLE = 'Liouville'


@dataclass(frozen=True)
class ClosedFormFamily:
    """One member of a closed-form family

    Attributes
    ----------
    family : Family
    parameters : dict
        ``alpha`` for parabolas, ``a`` and ``b`` for the Liouville family
    lam : float
    dim, delta : float
        Problem the member solves
    generator : callable
        r -> (U, dU, gap) on an array of radii
    """
    family: Family
    parameters: Dict[str, float]
    lam: float
    dim: int
    delta: float
    generator: Callable = field(repr=False, compare=False)

    @property
    def params(self):
        return ProblemParams(self.dim, self.delta, self.lam)


def rupture_line(params):
    """U = 1 - r, a rupture solution for lam = N - 1 - delta"""
    N, delta = params.dim, params.delta
    if not delta < N - 1:
        raise ParameterError('rupture line needs 0 < delta < N-1, got delta = {}'.format(delta))

    def generator(r):
        return 1.0 - r, -np.ones_like(r), np.array(r, dtype=float)

    return ClosedFormFamily(Family.RUPTURE_LINE, {}, N - 1 - delta, N, delta, generator)


def parabola(dim, alpha):
    """U = alpha (1 - r^2), a regular solution when delta = N/2"""
    if not 0.0 < alpha < 1.0:
        raise ParameterError('parabola needs 0 < alpha < 1, got {}'.format(alpha))

    def generator(r):
        return alpha * (1.0 - r * r), -2.0 * alpha * r, (1.0 - alpha) + alpha * r * r

    lam = 2.0 * dim * alpha * (1.0 - alpha)
    return ClosedFormFamily(Family.PARABOLA, {'alpha': alpha}, lam, dim, 0.5 * dim, generator)


def liouville_lambda(a, b):
    """Voltage of the Liouville member (a, b): 2 a b^4 / (a + 2 b^2)^2"""
    return 2.0 * a * b ** 4 / (a + 2.0 * b * b) ** 2


def _check_liouville(a, b):
    if not a > 0 or not 0.0 < b < 2.0:
        raise ParameterError('Liouville family needs a > 0 and 0 < b < 2, got a={}, b={}'.format(a, b))


def liouville(a, b):
    """Rupture solution in the disk for delta = 1 built from (a, b)"""
    _check_liouville(a, b)
    c = 0.5 * (2.0 - b)
    denom = a + 2.0 * b * b

    def generator(r):
        r = np.asarray(r, dtype=float)
        gap = (a * r ** b + 2.0 * b * b) / denom * r ** c
        dgap = (a * (b + c) * r ** (b + c - 1.0) + 2.0 * b * b * c * r ** (c - 1.0)) / denom
        return 1.0 - gap, -dgap, gap

    return ClosedFormFamily(Family.LIOUVILLE, {'a': a, 'b': b}, liouville_lambda(a, b), 2, 1.0, generator)


def build(member, nodes=None):
    """Sample a closed-form member on a grid

    Parameters
    ----------
    member : ClosedFormFamily
    nodes : array, optional
        Increasing radii in (0, 1]; geometric grid on [1e-6, 1] by default

    Returns
    -------
    RadialProfile
    """
    r = DEFAULT_NODES if nodes is None else np.asarray(nodes, dtype=float)
    U, dU, gap = member.generator(r)
    if member.family is Family.PARABOLA:
        return RadialProfile(r, U, dU, ProfileKind.REGULAR, member.lam,
                             alpha=member.parameters['alpha'], gap=gap)
    return RadialProfile(r, U, dU, ProfileKind.RUPTURE, member.lam, gap=gap)


def liouville_potential(a, b, r):
    """Singular Liouville solution and its derivatives

    v = log a + (b-2) log r - 2 log(1 + a r^b / (2 b^2)).

    Returns
    -------
    v, dv, ddv : ndarray
    """
    _check_liouville(a, b)
    r = np.asarray(r, dtype=float)
    rb = r ** b
    D = 2.0 * b * b + a * rb
    v = np.log(a) + (b - 2.0) * np.log(r) - 2.0 * np.log1p(a * rb / (2.0 * b * b))
    dv = (b - 2.0) / r - 2.0 * a * b * r ** (b - 1.0) / D
    ddv = (-(b - 2.0) / r ** 2
           - 2.0 * a * b * ((b - 1.0) * r ** (b - 2.0) * D - a * b * r ** (2.0 * b - 2.0)) / D ** 2)
    return v, dv, ddv


def liouville_singular_check(a, b, nodes=None, shift=0.0):
    """Residual of Delta v + e^v = 0 for the Liouville member (a, b)

    The residual is taken in the logarithmic radius, i.e. it is
    r^2 (v'' + v'/r + e^v), which keeps every term bounded down to r = 0.
    ``shift`` is added to v and serves to check that non-solutions are
    detected.
    """
    r = DEFAULT_NODES if nodes is None else np.asarray(nodes, dtype=float)
    v, dv, ddv = liouville_potential(a, b, r)
    res = r * r * ddv + r * dv + np.exp(v + shift + 2.0 * np.log(r))
    return float(np.max(np.abs(res)))


def liouville_sup(a_range=(1e-3, 1e3), b_range=(1e-3, 2.0 - 1e-3), num_a=801, num_b=400, refine=True):
    """Supremum of the Liouville voltages over a grid of (a, b)

    The grid is logarithmic in a.  With ``refine`` the best grid point
    is polished with a bounded scalar search in log a at the same b.

    Returns
    -------
    lam_sup : float
    a_best, b_best : float
    """
    a = np.geomspace(a_range[0], a_range[1], num_a)
    b = np.linspace(b_range[0], b_range[1], num_b)
    A, B = np.meshgrid(a, b, indexing='ij')
    lam = liouville_lambda(A, B)
    i, j = np.unravel_index(np.argmax(lam), lam.shape)
    best = (float(lam[i, j]), float(a[i]), float(b[j]))
    if refine:
        b_best = float(b[j])
        res = optimize.minimize_scalar(lambda t: -liouville_lambda(np.exp(t), b_best),
                                       bounds=(np.log(a_range[0]), np.log(a_range[1])),
                                       method='bounded', options={'xatol': 1e-10})
        if -res.fun > best[0]:
            best = (float(-res.fun), float(np.exp(res.x)), b_best)
    logger.info('Liouville supremum %.12g at a=%.6g, b=%.6g', *best)
    return best
