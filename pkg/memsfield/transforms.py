"""Changes of unknown that remove the gradient term

With u = phi(U) chosen so that phi' = phi^delta, the radial equation
becomes u'' + (N-1)/r u' + lam_t g(u) = 0 with one of three
nonlinearities:

* ``MEMS_POWER`` (0 < delta < 1): u = 1 - (1-U)^(1-delta),
  g(u) = (1-u)^(-p), lam_t = (1-delta) lam
* ``EXPONENTIAL`` (delta = 1): u = -2 log(1-U), g(u) = exp(u),
  lam_t = 2 lam
* ``SUPERLINEAR_POWER`` (delta > 1): u = (1-U)^(-(delta-1)) - 1,
  g(u) = (u+1)^p, lam_t = (delta-1) lam

All powers of 1-U are evaluated through ``log1p``/``expm1`` so that
values of U within 1e-12 of 1 do not overflow or cancel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .exceptions import DomainError, ParameterError
from .model import UNIT_TOL, transform_exponent


class TransformKind(Enum):
    MEMS_POWER = 'MEMSPower'
    EXPONENTIAL = 'Exponential'
    SUPERLINEAR_POWER = 'SuperlinearPower'


class Direction(Enum):
    FORWARD = 'forward'
    BACKWARD = 'backward'


@dataclass(frozen=True)
class TransformedProblem:
    """Transformed problem for a given delta and center value alpha

    Attributes
    ----------
    kind : TransformKind
    p : float or None
        Exponent of the power nonlinearities
    lambda_factor : float
        Ratio lam_t / lam
    center_value : float
        Transformed center value u(0)
    """
    kind: TransformKind
    p: Optional[float]
    lambda_factor: float
    center_value: float


def kind_of(delta):
    if not delta > 0:
        raise ParameterError('delta must be positive')
    if abs(delta - 1.0) <= UNIT_TOL:
        return TransformKind.EXPONENTIAL
    if delta < 1.0:
        return TransformKind.MEMS_POWER
    return TransformKind.SUPERLINEAR_POWER


def lambda_factor(delta):
    kind = kind_of(delta)
    if kind is TransformKind.EXPONENTIAL:
        return 2.0
    if kind is TransformKind.MEMS_POWER:
        return 1.0 - delta
    return delta - 1.0


def _scalar_or_array(values, result):
    if np.ndim(values) == 0:
        return float(result)
    return result


def to_transformed(U, delta):
    """Map U in [0, 1) to the transformed unknown u

    Parameters
    ----------
    U : float or array
    delta : float

    Returns
    -------
    float or array
    """
    U_arr = np.asarray(U, dtype=float)
    if np.any(U_arr >= 1.0):
        raise DomainError('U must be < 1 for the transform, got max {}'.format(U_arr.max()))
    log_gap = np.log1p(-U_arr)
    kind = kind_of(delta)
    if kind is TransformKind.EXPONENTIAL:
        u = -2.0 * log_gap
    elif kind is TransformKind.MEMS_POWER:
        u = -np.expm1((1.0 - delta) * log_gap)
    else:
        u = np.expm1(-(delta - 1.0) * log_gap)
    return _scalar_or_array(U, u)


def from_transformed(u, delta):
    """Inverse of :func:`to_transformed`"""
    u_arr = np.asarray(u, dtype=float)
    kind = kind_of(delta)
    if kind is TransformKind.EXPONENTIAL:
        U = -np.expm1(-0.5 * u_arr)
    elif kind is TransformKind.MEMS_POWER:
        if np.any(u_arr >= 1.0):
            raise DomainError('u must be < 1 on the MEMS branch')
        U = -np.expm1(np.log1p(-u_arr) / (1.0 - delta))
    else:
        if np.any(u_arr <= -1.0):
            raise DomainError('u must be > -1 on the superlinear branch')
        U = -np.expm1(-np.log1p(u_arr) / (delta - 1.0))
    return _scalar_or_array(u, U)


def map_lambda(lam, delta, direction=Direction.FORWARD):
    """Convert between lam and the transformed lam_t

    Parameters
    ----------
    lam : float
    delta : float
    direction : Direction or str
        ``'forward'`` multiplies by the branch factor, ``'backward'``
        divides by it
    """
    direction = Direction(direction)
    factor = lambda_factor(delta)
    if direction is Direction.FORWARD:
        return lam * factor
    return lam / factor


def transformed_problem(delta, alpha):
    """Transformed problem for center value U(0) = alpha"""
    return TransformedProblem(
        kind=kind_of(delta),
        p=transform_exponent(delta),
        lambda_factor=lambda_factor(delta),
        center_value=to_transformed(alpha, delta),
    )


def nonlinearity(kind, p=None):
    """Return (g, dg) for the transformed equation u'' + ... + lam_t g(u) = 0"""
    kind = TransformKind(kind)
    if kind is TransformKind.EXPONENTIAL:
        return math.exp, math.exp
    if kind is TransformKind.MEMS_POWER:
        return (lambda u: (1.0 - u) ** (-p),
                lambda u: p * (1.0 - u) ** (-p - 1.0))
    return (lambda u: (u + 1.0) ** p,
            lambda u: p * (u + 1.0) ** (p - 1.0))
