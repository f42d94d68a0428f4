"""Bifurcation curves alpha -> lam(alpha)

:func:`trace` shoots one profile per sampled center value and
classifies the resulting curve.  Type II curves oscillate around
lam* = N - 1 - delta as alpha -> 1; Type I curves increase towards it;
for delta >= N/2 the curve has a single interior maximum (the fold)
and falls back to 0.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy import optimize

from ..exceptions import FoldNotInterior, NumericalError, ParameterError
from ..model import CurveType, lambda_star, thresholds
from ..solvers.shoot import DEFAULT_CONTROLS, residual, shoot

logger = logging.getLogger(__name__)

TAIL_RANGE = (1e-8, 1e-1)
TAIL_SAMPLES = 60
MAX_DROP_FRACTION = 0.1
# relative dead band around lam* inside which a sample has no sign
CROSSING_BAND = 1e-6
FOLD_RTOL = 1e-4
# a fold curve ends below this fraction of its largest sample
FOLD_TAIL_FRACTION = 1e-2


@dataclass(frozen=True)
class CurveSample:
    alpha: float
    lam: float
    s0: float
    residual: float


@dataclass
class BifurcationCurve:
    """Sampled bifurcation curve with its classification

    Attributes
    ----------
    samples : list of CurveSample
        Successful shots in increasing alpha
    classification : CurveType
    crossings : int
        Sign changes of lam(alpha) - lam* over the tail window
    lambda_bar : float
        Largest sampled voltage
    alpha_at_fold : float
        Center value of the largest sampled voltage
    failures : list of (alpha, str)
        Dropped samples and the reason
    """
    params: object
    samples: List[CurveSample]
    classification: CurveType
    crossings: int
    lambda_bar: float
    alpha_at_fold: float
    failures: List[Tuple[float, str]] = field(default_factory=list)
    controls: object = field(default=DEFAULT_CONTROLS, repr=False)

    @property
    def alphas(self):
        return np.array([s.alpha for s in self.samples])

    @property
    def lambdas(self):
        return np.array([s.lam for s in self.samples])

    def to_frame(self):
        """DataFrame with columns alpha, lambda, s0, residual"""
        return pd.DataFrame({
            'alpha': self.alphas,
            'lambda': self.lambdas,
            's0': [s.s0 for s in self.samples],
            'residual': [s.residual for s in self.samples],
        })


@dataclass(frozen=True)
class BoundsReport:
    lambda_bar_numeric: float
    lower: Optional[float]
    upper: float
    satisfied: bool


def alpha_grid(body=40, tail_samples=TAIL_SAMPLES, tail_range=TAIL_RANGE, body_max=0.9):
    """Center values for a curve trace

    Parameters
    ----------
    body : int
        Uniform samples in (0, body_max]
    tail_samples : int
        Geometric samples of 1 - alpha over ``tail_range``; the decades
        1 - alpha = 10^-k inside the range are always included
    """
    parts = []
    if body > 0:
        parts.append(np.linspace(body_max / body, body_max, body))
    if tail_samples > 0:
        gaps = np.geomspace(tail_range[1], tail_range[0], tail_samples)
        k = np.arange(np.ceil(-np.log10(tail_range[1])), np.floor(-np.log10(tail_range[0])) + 1)
        parts.append(1.0 - np.concatenate([gaps, 10.0 ** -k]))
    return np.unique(np.concatenate(parts))


def _shoot_sample(args):
    params, alpha, controls = args
    try:
        shot = shoot(params, alpha, controls)
    except NumericalError as err:
        return alpha, None, '{}: {}'.format(type(err).__name__, err)
    return alpha, CurveSample(alpha, shot.lam, shot.s0, residual(shot.profile, params)), None


def count_crossings(lambdas, level, band=CROSSING_BAND):
    """Sign changes of lambdas - level, ignoring values inside the band"""
    signs = np.sign(np.asarray(lambdas) - level)
    signs[np.abs(np.asarray(lambdas) - level) <= band * abs(level)] = 0
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def _classify(params, alphas, lambdas, dropped_fraction):
    if dropped_fraction > MAX_DROP_FRACTION or len(lambdas) < 3:
        return CurveType.INCONCLUSIVE, 0
    lam_star = lambda_star(params)
    tail = (1.0 - alphas) <= TAIL_RANGE[1] * (1 + 1e-12)
    i_max = int(np.argmax(lambdas))
    # the curve must fall towards 0, not towards lam*
    to_zero = lambdas[-1] <= FOLD_TAIL_FRACTION * lambdas[i_max]
    if lam_star is not None:
        to_zero = to_zero and lambdas[-1] <= 0.5 * lam_star
    if 0 < i_max < len(lambdas) - 1 and to_zero:
        crossings = count_crossings(lambdas[tail], lam_star) if lam_star is not None else 0
        return CurveType.FOLD_CURVE, crossings
    if lam_star is None or np.count_nonzero(tail) < 2:
        return CurveType.INCONCLUSIVE, 0
    tail_lams = lambdas[tail]
    crossings = count_crossings(tail_lams, lam_star)
    if crossings >= 2:
        return CurveType.TYPE_II, crossings
    band = CROSSING_BAND * lam_star
    if crossings == 0 and np.all(np.diff(tail_lams) >= -band):
        return CurveType.TYPE_I, crossings
    return CurveType.INCONCLUSIVE, crossings


def trace(params, grid=None, controls=DEFAULT_CONTROLS, workers=1):
    """Trace the bifurcation curve over a grid of center values

    Parameters
    ----------
    params : ProblemParams
    grid : array, optional
        Center values in (0, 1); :func:`alpha_grid` by default
    controls : IntegratorControls
    workers : int
        Number of processes used for the shots

    Returns
    -------
    BifurcationCurve
    """
    alphas = alpha_grid() if grid is None else np.unique(np.asarray(grid, dtype=float))
    if alphas[0] <= 0 or alphas[-1] >= 1:
        raise ParameterError('grid must lie inside (0, 1)')
    jobs = [(params, float(a), controls) for a in alphas]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_shoot_sample, jobs))
    else:
        results = [_shoot_sample(job) for job in jobs]

    samples, failures = [], []
    for alpha, sample, reason in results:
        if sample is None:
            logger.warning('dropped alpha=%.12g (%s)', alpha, reason)
            failures.append((alpha, reason))
        else:
            samples.append(sample)

    a = np.array([s.alpha for s in samples])
    lam = np.array([s.lam for s in samples])
    classification, crossings = _classify(params, a, lam, len(failures) / len(alphas))
    i_max = int(np.argmax(lam)) if len(lam) else 0
    curve = BifurcationCurve(
        params=params,
        samples=samples,
        classification=classification,
        crossings=crossings,
        lambda_bar=float(lam[i_max]) if len(lam) else float('nan'),
        alpha_at_fold=float(a[i_max]) if len(a) else float('nan'),
        failures=failures,
        controls=controls,
    )
    logger.info('N=%d delta=%g: %s with %d crossings, max lambda %.10g',
                params.dim, params.delta, classification.value, crossings, curve.lambda_bar)
    return curve


def turning_points(curve):
    """Local extrema (alpha, lam) of the sampled curve"""
    lam = curve.lambdas
    a = curve.alphas
    d = np.sign(np.diff(lam))
    idx = np.nonzero(d[1:] * d[:-1] < 0)[0] + 1
    return [(float(a[i]), float(lam[i])) for i in idx]


def fold(curve):
    """Locate the fold of a fold curve

    A parabola through the largest sample and its neighbours gives a
    first estimate; a bounded Brent search on the shot between the
    neighbours refines it.

    Returns
    -------
    lambda_bar : float
    alpha_hat : float
    """
    a, lam = curve.alphas, curve.lambdas
    i = int(np.argmax(lam))
    if i == 0 or i == len(lam) - 1:
        raise FoldNotInterior('largest sample at alpha={} is on the grid boundary'.format(a[i]))
    coeffs = np.polyfit(a[i - 1:i + 2], lam[i - 1:i + 2], 2)
    alpha_hat = -coeffs[1] / (2.0 * coeffs[0]) if coeffs[0] < 0 else a[i]
    alpha_hat = float(np.clip(alpha_hat, a[i - 1], a[i + 1]))
    lambda_bar = float(np.polyval(coeffs, alpha_hat))

    def negative_lambda(alpha):
        return -shoot(curve.params, alpha, curve.controls).lam

    res = optimize.minimize_scalar(negative_lambda, bounds=(a[i - 1], a[i + 1]), method='bounded',
                                   options={'xatol': 1e-8})
    if res.success:
        lambda_bar, alpha_hat = float(-res.fun), float(res.x)
    lambda_bar = max(lambda_bar, float(lam[i]))
    logger.info('fold at alpha=%.10g, lambda=%.12g', alpha_hat, lambda_bar)
    return lambda_bar, alpha_hat


def _fold_value(curve):
    # refined fold for fold curves, largest sample otherwise
    if curve.classification is CurveType.FOLD_CURVE:
        try:
            return fold(curve)[0]
        except FoldNotInterior:
            pass
    return curve.lambda_bar


def multiplicity(curve, lam, fold_value=None, fold_rtol=FOLD_RTOL):
    """Number of sampled solutions with voltage lam

    Counts the sign changes of lam(alpha) - lam along the curve.  A
    voltage within ``fold_rtol`` of the fold value counts as the single
    tangential solution.  The fold value defaults to :func:`fold` for
    fold curves and to the largest sample otherwise.
    """
    lam_bar = _fold_value(curve) if fold_value is None else fold_value
    if abs(lam - lam_bar) <= fold_rtol * lam_bar:
        return 1
    signs = np.sign(curve.lambdas - lam)
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def check_bounds(params, curve, mu1):
    """Compare the extremal voltage against the analytic sandwich

    Parameters
    ----------
    params : ProblemParams
    curve : BifurcationCurve
    mu1 : float
        First Dirichlet eigenvalue of the unit ball

    Returns
    -------
    BoundsReport
    """
    th = thresholds(params, mu1)
    lam_bar = _fold_value(curve)
    lower = th.lambda_bar_lower
    satisfied = (lower is None or lower <= lam_bar) and lam_bar < th.lambda_upper
    return BoundsReport(lambda_bar_numeric=lam_bar, lower=lower, upper=th.lambda_upper,
                        satisfied=bool(satisfied))
