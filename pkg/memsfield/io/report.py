"""Regime table: voltage ranges of regular and rupture solutions per (N, delta)"""

import logging
from fractions import Fraction

import pandas as pd

from ..analysis import bifurcation
from ..exceptions import FoldNotInterior, NumericalError
from ..model import Branch, CurveType, ProblemParams, classify_regime, lambda_star, thresholds
from ..solvers import picard
from .. import spectral

logger = logging.getLogger(__name__)

COLUMNS = ['dim', 'delta', 'branch', 'curve_type', 'regular', 'rupture']


def format_number(x, max_denominator=64):
    """Short exact form for simple fractions, 6 significant digits otherwise"""
    frac = Fraction(x).limit_denominator(max_denominator)
    if abs(float(frac) - x) <= 1e-12 * max(1.0, abs(x)):
        return str(frac)
    return '{:.6g}'.format(x)


def _traced_bar(params, workers):
    curve = bifurcation.trace(params, workers=workers)
    if curve.classification is CurveType.FOLD_CURVE:
        try:
            return bifurcation.fold(curve)[0]
        except FoldNotInterior:
            pass
    return curve.lambda_bar


def regular_cell(params, regime, traced_bar=None):
    """Voltage range with regular solutions"""
    if regime.branch is Branch.CRITICAL:
        return '(0, {}]'.format(format_number(0.5 * params.dim))
    if regime.predicted_type is CurveType.TYPE_I:
        return '(0, {})'.format(format_number(lambda_star(params)))
    bar = 'λ̄' if traced_bar is None else format_number(traced_bar)
    return '(0, {}]'.format(bar)


def rupture_cell(params):
    """Voltage range with rupture solutions"""
    N, delta = params.dim, params.delta
    th = thresholds(params, spectral.mu1(N).mu1)
    if params.is_half_dim:
        if N == 2:
            return '(0, 1)'
        return '(0, {})'.format(format_number(0.5 * N))
    if delta < 0.5 * N:
        return 'λ* = {}'.format(format_number(th.lambda_star))
    if delta < N - 1:
        return '(0, {})'.format(format_number(th.lambda_3star))
    if N >= 3 and abs(delta - (N - 1)) <= 1e-12:
        return '(0, λc) for small λc'
    unit = params.with_lambda(1.0)
    if N == 2:
        bound = picard.constructive_threshold(picard.disk_kernel(unit))
        return '(0, λ**) with λ** ≥ {}'.format(format_number(bound))
    bound = picard.constructive_threshold(picard.exterior_kernel(unit))
    return '(0, λ****) with λ**** ≥ {}'.format(format_number(bound))


def regime_table(dims, deltas, trace=False, workers=1):
    """Build the table of voltage ranges

    Parameters
    ----------
    dims : iterable of int
    deltas : iterable of float
    trace : bool
        Replace the symbolic extremal voltage by a traced value
    workers : int
        Processes used when tracing

    Returns
    -------
    DataFrame
        Columns dim, delta, branch, curve_type, regular, rupture
    """
    rows = []
    for N in dims:
        for delta in deltas:
            params = ProblemParams(int(N), float(delta))
            regime = classify_regime(params)
            traced_bar = None
            if trace and regime.branch is not Branch.CRITICAL and regime.predicted_type is not CurveType.TYPE_I:
                try:
                    traced_bar = _traced_bar(params, workers)
                except NumericalError as err:
                    logger.warning('trace failed for N=%d delta=%g: %s', N, delta, err)
            rows.append({
                'dim': params.dim,
                'delta': params.delta,
                'branch': regime.branch.value,
                'curve_type': regime.predicted_type.value,
                'regular': regular_cell(params, regime, traced_bar),
                'rupture': rupture_cell(params),
            })
    return pd.DataFrame(rows, columns=COLUMNS)
