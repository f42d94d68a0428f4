"""Problem parameters, analytic thresholds and regime classification

The problem is the radial boundary value problem

    U'' + (N-1)/r U' + (lam + delta U'^2) / (1 - U) = 0,   U'(0) = 0, U(1) = 0

on the unit ball in dimension N.  This module holds the parameter
record, the closed-form thresholds and the a-priori classification of
the bifurcation curve alpha -> lam(alpha).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from .exceptions import ParameterError

logger = logging.getLogger(__name__)

# delta closer than this to 1 (or to N/2) is treated as equal to it
UNIT_TOL = 1e-8


class Branch(Enum):
    """Range of the fringing coefficient delta"""
    SUB_UNIT = 'SubUnit'
    UNIT = 'Unit'
    MID_RANGE = 'MidRange'
    CRITICAL = 'Critical'
    FOLD = 'Fold'


class CurveType(Enum):
    """Shape of the bifurcation curve"""
    TYPE_I = 'TypeI'
    TYPE_II = 'TypeII'
    FOLD_CURVE = 'FoldCurve'
    INCONCLUSIVE = 'Inconclusive'


@dataclass(frozen=True)
class ProblemParams:
    """Dimension, fringing coefficient and optional voltage

    Parameters
    ----------
    dim : int
        Space dimension N >= 2
    delta : float
        Fringing coefficient, > 0
    lam : float, optional
        Voltage, > 0 when given
    """
    dim: int
    delta: float
    lam: Optional[float] = None

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ParameterError('dim must be an integer >= 2, got {}'.format(self.dim))
        if not self.delta > 0:
            raise ParameterError('delta must be positive, got {}'.format(self.delta))
        if self.lam is not None and not self.lam > 0:
            raise ParameterError('lambda must be positive when given, got {}'.format(self.lam))

    @property
    def is_unit(self):
        return abs(self.delta - 1.0) <= UNIT_TOL

    @property
    def is_half_dim(self):
        return abs(self.delta - 0.5 * self.dim) <= UNIT_TOL

    def with_lambda(self, lam):
        return ProblemParams(self.dim, self.delta, lam)


@dataclass(frozen=True)
class Thresholds:
    """Closed-form thresholds for a given (N, delta)

    Fields that are not defined for the parameter combination are None.
    Critical exponents are floats and may be ``math.inf``.
    """
    lambda_star: Optional[float]
    lambda_3star: Optional[float]
    lambda_bar_lower: Optional[float]
    lambda_upper: float
    p: Optional[float]
    p_c: float
    p_S: float
    p_JL: float


@dataclass(frozen=True)
class RegimeClass:
    branch: Branch
    predicted_type: CurveType


def transform_exponent(delta):
    """Exponent p of the transformed nonlinearity, None on the unit branch"""
    if abs(delta - 1.0) <= UNIT_TOL:
        return None
    if delta < 1.0:
        return (1.0 + delta) / (1.0 - delta)
    return (delta + 1.0) / (delta - 1.0)


def critical_exponents(dim) -> Tuple[float, float, float]:
    """Return the exponents (p_c, p_S, p_JL) for dimension N

    p_c separates oscillating from monotone curves for the MEMS power
    nonlinearity, p_S is the Sobolev exponent and p_JL the
    Joseph-Lundgren exponent.
    """
    root = math.sqrt(dim - 1)
    if dim >= 10:
        p_c = math.inf
    else:
        p_c = -1.0 + 4.0 / (4.0 - dim + 2.0 * root)
    p_S = math.inf if dim <= 2 else (dim + 2.0) / (dim - 2.0)
    p_JL = math.inf if dim < 11 else 1.0 + 4.0 / (dim - 4.0 - 2.0 * root)
    return p_c, p_S, p_JL


def lambda_star(params):
    """Limit value N-1-delta, None when delta >= N-1"""
    if params.delta < params.dim - 1:
        return params.dim - 1 - params.delta
    return None


def thresholds(params, mu1):
    """Evaluate all thresholds for the given parameters

    Parameters
    ----------
    params : ProblemParams
    mu1 : float
        First Dirichlet eigenvalue of the unit N-ball

    Returns
    -------
    Thresholds
    """
    if not mu1 > 0:
        raise ParameterError('mu1 must be positive')
    N, delta = params.dim, params.delta
    lam3 = None
    if N >= 3 and 0.5 * N <= delta < N - 1:
        lam3 = delta * (N - 1 - delta) / (delta - 1.0)
    lower = None
    if delta > 1.0 and not params.is_unit:
        lower = N * (2.0 / (delta + 1.0)) ** ((delta + 1.0) / (delta - 1.0))
    p_c, p_S, p_JL = critical_exponents(N)
    return Thresholds(
        lambda_star=lambda_star(params),
        lambda_3star=lam3,
        lambda_bar_lower=lower,
        lambda_upper=min(mu1 / 4.0, mu1 / delta),
        p=transform_exponent(delta),
        p_c=p_c,
        p_S=p_S,
        p_JL=p_JL,
    )


def branch_of(params):
    # N=2, delta=1 is both Unit and Critical; the parabola law governs it
    if params.is_half_dim:
        return Branch.CRITICAL
    if params.is_unit:
        return Branch.UNIT
    if params.delta < 1.0:
        return Branch.SUB_UNIT
    if params.delta < 0.5 * params.dim:
        return Branch.MID_RANGE
    return Branch.FOLD


def classify_regime(params):
    """Predicted branch and curve type for (N, delta)

    Type I when N >= 3 and delta <= (N - 2 - 2 sqrt(N-1)) / 2, Type II for
    the remaining delta < N/2, and a fold curve for delta >= N/2.
    """
    N, delta = params.dim, params.delta
    type_one_edge = 0.5 * (N - 2 - 2.0 * math.sqrt(N - 1))
    if delta >= 0.5 * N - UNIT_TOL:
        predicted = CurveType.FOLD_CURVE
    elif N >= 3 and delta <= type_one_edge + 1e-12:
        predicted = CurveType.TYPE_I
    else:
        predicted = CurveType.TYPE_II
    return RegimeClass(branch_of(params), predicted)


def lambda_tilde_star(params):
    """Limit of the transformed eigenvalue as the center value becomes singular

    Only defined for delta < N - 1.
    """
    N, delta = params.dim, params.delta
    if lambda_star(params) is None:
        raise ParameterError('limit value only defined for delta < N-1')
    if params.is_unit:
        return 2.0 * (N - 2)
    p = transform_exponent(delta)
    if delta < 1.0:
        q = 2.0 / (p + 1.0)
        return q * (N - 2 + q)
    q = 2.0 / (p - 1.0)
    return q * (N - 2 - q)


def exponent_type(params):
    """Curve type read off from the transformed exponent

    MEMS branch: Type I iff p <= p_c.  Exponential branch: Type I iff
    N >= 10.  Superlinear branch below N/2: Type I iff p >= p_JL.
    """
    N, delta = params.dim, params.delta
    if delta >= 0.5 * N - UNIT_TOL:
        return CurveType.FOLD_CURVE
    p_c, _, p_JL = critical_exponents(N)
    if params.is_unit:
        return CurveType.TYPE_I if N >= 10 else CurveType.TYPE_II
    p = transform_exponent(delta)
    if delta < 1.0:
        if N >= 3 and p <= p_c:
            return CurveType.TYPE_I
        return CurveType.TYPE_II
    return CurveType.TYPE_I if p >= p_JL else CurveType.TYPE_II
