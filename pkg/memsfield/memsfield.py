"""Provides entry point main()"""

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import pandas as pd

from . import spectral
from .analysis import bifurcation, exact
from .exceptions import ParameterError, PreconditionViolated
from .io.report import regime_table
from .io.utils import json_text, write_csv_file, write_json_file
from .model import ProblemParams, thresholds
from .solvers import critical, phaseplane, picard
from .solvers.shoot import DEFAULT_CONTROLS, residual, shoot

logger = logging.getLogger(__name__)

ENV_PREFIX = 'MEMSFIELD_'
COMMANDS = ('bifurcate', 'exact-verify', 'phase', 'picard', 'critical', 'mu1', 'report')
FORMATS = ('csv', 'json')
FAMILIES = ('parabola', 'rupture-line', 'liouville')


class _Parser(argparse.ArgumentParser):
    # usage errors are validation failures (exit 1), not argparse's exit 2
    def error(self, message):
        raise ParameterError(message)


def _env(name, default=None):
    """Value of MEMSFIELD_<NAME>, or default when the variable is unset"""
    return os.environ.get(ENV_PREFIX + name, default)


def _number_list(convert):
    def parse(text):
        try:
            return [convert(item) for item in str(text).replace(',', ' ').split()]
        except ValueError:
            raise argparse.ArgumentTypeError('expected a comma separated list, got {!r}'.format(text))
    return parse


@dataclass(frozen=True)
class RunConfig:
    """Validated settings of one command-line run

    Attributes
    ----------
    command : str
    params : ProblemParams, optional
        Not used by ``report``
    tolerances : dict
        Tolerances the run is computed under; copied into every summary
    output_path : str, optional
        Base name of the output files; the summary goes to stdout when None
    format : str
        ``csv`` writes tabular data next to the JSON summary, ``json``
        embeds it in the summary
    options : dict
        Command-specific settings
    workers : int
    """
    command: str
    params: Optional[ProblemParams]
    tolerances: dict
    output_path: Optional[str] = None
    format: str = 'csv'
    options: dict = field(default_factory=dict)
    workers: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ParameterError('unknown command {!r}'.format(self.command))
        if self.format not in FORMATS:
            raise ParameterError('format must be one of {}, got {!r}'.format(FORMATS, self.format))
        if self.workers < 1:
            raise ParameterError('workers must be at least 1')
        for name, value in self.tolerances.items():
            if not value > 0:
                raise ParameterError('tolerance {} must be positive, got {}'.format(name, value))

    @property
    def paths(self):
        """(csv, json) output file names"""
        root, _ = os.path.splitext(self.output_path)
        return root + '.csv', root + '.json'


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument('-v', '--verbose', action='count', default=0, help='increase log level (-vv for debug)')
    common.add_argument('--output', default=_env('OUTPUT'), help='base name of the output files')
    common.add_argument('--format', choices=FORMATS, default=_env('FORMAT', 'csv'), help='format of tabular data')
    common.add_argument('--workers', type=int, default=_env('WORKERS', '1'), help='processes for curve tracing')

    def dim_arg(p):
        p.add_argument('--dim', type=int, default=_env('DIM'), help='space dimension N')

    def delta_arg(p):
        p.add_argument('--delta', type=float, default=_env('DELTA'), help='fringing coefficient')

    def lambda_arg(p, default=None):
        p.add_argument('--lambda', dest='lam', type=float, default=_env('LAMBDA', default), help='voltage')

    def tolerance_args(p):
        p.add_argument('--rtol', type=float, default=_env('RTOL', str(DEFAULT_CONTROLS.rtol)))
        p.add_argument('--atol', type=float, default=_env('ATOL', str(DEFAULT_CONTROLS.atol)))

    parser = _Parser(prog='mems-field', description="mems-field command-line interface.  Try 'mems-field <cmd> -h' for information on how to use a particular command")
    subparsers = parser.add_subparsers(title='command', dest='command', help='available mems-field commands')

    p_bif = subparsers.add_parser('bifurcate', parents=[common], help='trace and classify the bifurcation curve')
    dim_arg(p_bif)
    delta_arg(p_bif)
    tolerance_args(p_bif)
    p_bif.add_argument('--tail-samples', type=int, default=_env('TAIL_SAMPLES', '60'))
    p_bif.add_argument('--body', type=int, default=_env('BODY', '40'), help='uniform samples with alpha <= 0.9')

    p_exact = subparsers.add_parser('exact-verify', parents=[common], help='check a closed-form family against the equation')
    p_exact.add_argument('--family', choices=FAMILIES, default=_env('FAMILY', 'parabola'))
    dim_arg(p_exact)
    delta_arg(p_exact)
    tolerance_args(p_exact)
    p_exact.add_argument('--alpha', type=_number_list(float), default=_env('ALPHA'), help='parabola center values')
    p_exact.add_argument('--a', type=float, default=_env('A', '1.0'), help='Liouville parameter a')
    p_exact.add_argument('--b', type=float, default=_env('B', '1.0'), help='Liouville parameter b')
    p_exact.add_argument('--shoot', action='store_true', help='compare parabola voltages with shooting')

    p_phase = subparsers.add_parser('phase', parents=[common], help='rupture solution from the phase plane')
    dim_arg(p_phase)
    delta_arg(p_phase)
    lambda_arg(p_phase)
    p_phase.add_argument('--y0', type=float, default=_env('Y0', '0.0'))
    p_phase.add_argument('--horizon', type=float, default=_env('HORIZON', str(phaseplane.T_HORIZON)))

    p_picard = subparsers.add_parser('picard', parents=[common], help='rupture solution from the Picard scheme')
    dim_arg(p_picard)
    delta_arg(p_picard)
    lambda_arg(p_picard)
    p_picard.add_argument('--m', type=float, default=_env('M'), help='asymptotic slope, best feasible by default')
    p_picard.add_argument('--horizon', type=float, default=_env('HORIZON', str(picard.T_HORIZON)))
    p_picard.add_argument('--tol', type=float, default=_env('TOL', str(picard.TOL)))

    p_crit = subparsers.add_parser('critical', parents=[common], help='singular solutions at the critical exponent')
    dim_arg(p_crit)
    lambda_arg(p_crit, '1e-3')
    p_crit.add_argument('--alpha', type=float, default=_env('ALPHA', '0.05'), help='boundary slope magnitude')
    p_crit.add_argument('--a', type=float, default=_env('A', '1.0'), help='boundary value of the rescaled solution')
    p_crit.add_argument('--r-min', type=float, default=_env('R_MIN', str(critical.R_MIN)))

    p_mu1 = subparsers.add_parser('mu1', parents=[common], help='first Dirichlet eigenvalue of the unit ball')
    dim_arg(p_mu1)

    p_report = subparsers.add_parser('report', parents=[common], help='voltage ranges per dimension and delta')
    p_report.add_argument('--dims', type=_number_list(int), default=_env('DIMS', '2,3,4,5,10'))
    p_report.add_argument('--deltas', type=_number_list(float), default=_env('DELTAS', '0.5,1,1.5,1.75,2,2.5,3'))
    p_report.add_argument('--trace', action='store_true', help='trace curves for the extremal voltage')
    return parser


def _require(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise ParameterError('--{} is required for {}'.format(name.replace('_', '-').replace('lam', 'lambda'),
                                                                 args.command))


def config_from_args(args):
    """Translate parsed arguments into a RunConfig"""
    command = args.command
    if command is None:
        raise ParameterError('a command is required')
    tolerances = {}
    options = {}
    params = None
    if command == 'bifurcate':
        _require(args, 'dim', 'delta')
        params = ProblemParams(args.dim, args.delta)
        tolerances = {'rtol': args.rtol, 'atol': args.atol}
        options = {'tail_samples': args.tail_samples, 'body': args.body}
    elif command == 'exact-verify':
        _require(args, 'dim')
        delta = args.delta
        if args.family == 'parabola':
            delta = 0.5 * args.dim
        elif args.family == 'liouville':
            delta = 1.0
        if delta is None:
            raise ParameterError('--delta is required for the rupture line')
        dim = 2 if args.family == 'liouville' else args.dim
        params = ProblemParams(dim, delta)
        tolerances = {'rtol': args.rtol, 'atol': args.atol}
        options = {'family': args.family, 'alphas': args.alpha, 'a': args.a, 'b': args.b, 'shoot': args.shoot}
    elif command in ('phase', 'picard'):
        _require(args, 'dim', 'delta', 'lam')
        params = ProblemParams(args.dim, args.delta, args.lam)
        options = {'horizon': args.horizon}
        if command == 'phase':
            options['y0'] = args.y0
            tolerances = {'rtol': phaseplane.RTOL, 'atol': phaseplane.ATOL,
                          'convergence': phaseplane.CONVERGENCE_TOL}
        else:
            options['m'] = args.m
            tolerances = {'tol': args.tol, 'step': picard.STEP}
    elif command == 'critical':
        _require(args, 'dim')
        params = ProblemParams(args.dim, args.dim - 1.0, args.lam)
        options = {'alpha': args.alpha, 'a': args.a, 'r_min': args.r_min}
        tolerances = {'rtol': critical.RTOL, 'atol': critical.ATOL, 'fd_step': critical.FD_STEP}
    elif command == 'mu1':
        _require(args, 'dim')
        params = ProblemParams(args.dim, 1.0)
        tolerances = {'xtol': spectral.ZERO_XTOL}
    else:
        options = {'dims': args.dims, 'deltas': args.deltas, 'trace': args.trace}
    return RunConfig(command=command, params=params, tolerances=tolerances, output_path=args.output,
                     format=args.format, options=options, workers=args.workers)


def _bifurcate(config):
    params = config.params
    controls = replace(DEFAULT_CONTROLS, rtol=config.tolerances['rtol'], atol=config.tolerances['atol'])
    grid = bifurcation.alpha_grid(body=config.options['body'], tail_samples=config.options['tail_samples'])
    curve = bifurcation.trace(params, grid, controls, workers=config.workers)
    mu1 = spectral.mu1(params.dim).mu1
    bounds = bifurcation.check_bounds(params, curve, mu1)
    th = thresholds(params, mu1)
    summary = {
        'dim': params.dim,
        'delta': params.delta,
        'lambda_star': th.lambda_star,
        'lambda_3star': th.lambda_3star,
        'classification': curve.classification,
        'crossings': curve.crossings,
        'lambda_bar': bounds.lambda_bar_numeric,
        'alpha_at_fold': curve.alpha_at_fold,
        'bounds': {'lower': bounds.lower, 'upper': bounds.upper, 'satisfied': bounds.satisfied},
        'dropped': len(curve.failures),
    }
    return curve.to_frame(), summary


def _exact_verify(config):
    params, options = config.params, config.options
    family = options['family']
    if family == 'parabola':
        alphas = options['alphas'] or np.linspace(0.02, 0.98, 49)
        rows = []
        for alpha in alphas:
            member = exact.parabola(params.dim, alpha)
            row = {'alpha': alpha, 'lambda': member.lam, 'residual': residual(exact.build(member), params)}
            if options['shoot']:
                controls = replace(DEFAULT_CONTROLS, rtol=config.tolerances['rtol'], atol=config.tolerances['atol'])
                row['lambda_shot'] = shoot(params, alpha, controls).lam
                row['error'] = abs(row['lambda_shot'] - member.lam)
            rows.append(row)
        frame = pd.DataFrame(rows)
        summary = {'family': family, 'dim': params.dim, 'delta': params.delta,
                   'max_residual': float(frame['residual'].max())}
        if options['shoot']:
            summary['max_lambda_error'] = float(frame['error'].max())
        return frame, summary
    if family == 'rupture-line':
        member = exact.rupture_line(params)
        profile = exact.build(member)
        return profile.to_frame(), {'family': family, 'dim': params.dim, 'delta': params.delta,
                                    'lambda': member.lam, 'max_residual': residual(profile, params)}
    member = exact.liouville(options['a'], options['b'])
    profile = exact.build(member)
    return profile.to_frame(), {'family': family, 'dim': 2, 'delta': 1.0, 'a': options['a'], 'b': options['b'],
                                'lambda': member.lam,
                                'max_residual': exact.liouville_singular_check(options['a'], options['b'])}


def _phase(config):
    params, options = config.params, config.options
    profile, trace = phaseplane.construct_rupture(params.dim, params.delta, params.lam, options['y0'],
                                                  T=options['horizon'])
    diagnostics = phaseplane.orbit_diagnostics(trace)
    c_max, c_min = phaseplane.rupture_constant(profile, params.dim)
    summary = {
        'dim': params.dim,
        'delta': params.delta,
        'lambda': params.lam,
        'y0': options['y0'],
        'x_end': float(trace.x[-1]),
        'converged': diagnostics.converged_to_1,
        'max_energy_increase': diagnostics.max_energy_increase,
        'period': diagnostics.period_estimate,
        'closure': diagnostics.closure,
        'c0': diagnostics.c0,
        'c_max': c_max,
        'c_min': c_min,
    }
    return profile.to_frame(), summary


def _picard(config):
    params, options = config.params, config.options
    kernel = picard.disk_kernel(params) if params.dim == 2 else picard.exterior_kernel(params)
    interval = picard.feasible_m(kernel)
    m = interval.m_best if options['m'] is None else options['m']
    if not interval.m_lo < m < interval.m_hi:
        raise PreconditionViolated('m = {} outside the feasible interval ({:.6g}, {:.6g})'.format(
            m, interval.m_lo, interval.m_hi))
    T = options['horizon']
    solution = picard.solve(kernel, m, T=T, tol=config.tolerances['tol'])
    profile = picard.to_rupture(kernel, solution, params)
    summary = {
        'dim': params.dim,
        'delta': params.delta,
        'lambda': params.lam,
        'kernel': kernel.kind,
        'feasible': {'m_lo': interval.m_lo, 'm_hi': interval.m_hi, 'm_best': interval.m_best,
                     'h_min': interval.h_min},
        'threshold': picard.constructive_threshold(kernel),
        'm': m,
        'iterations': solution.iterations,
        'cone_ok': solution.cone_ok,
        'ode_residual': picard.ode_residual(kernel, solution),
        'slope_error': float(solution.deviation[-1] / T),
        'slope_bound': picard.slope_bound(kernel, m, T),
    }
    return profile.to_frame(), summary


def _critical(config):
    params, options = config.params, config.options
    shot = critical.shoot_inward(params.dim, options['alpha'], options['r_min'])
    member = critical.rescale_family(shot, params.lam, options['a'])
    trend = critical.aviles_trend(shot)
    summary = {
        'dim': params.dim,
        'alpha': shot.alpha,
        'lambda': params.lam,
        'a': options['a'],
        'singular_candidate': shot.singular_candidate,
        'r_end': shot.r_end,
        'rho': member.rho,
        'boundary_value': member.boundary_value,
        'residual': critical.singular_residual(member),
        'aviles': {'radii': trend.radii, 'ratios': trend.ratios, 'limit': trend.limit,
                   'monotone': trend.monotone},
    }
    return pd.DataFrame({'r': member.radii, 'V': member.V, 'dV': member.dV}), summary


def _mu1(config):
    result = spectral.mu1(config.params.dim)
    return None, {'dim': result.N, 'nu': result.nu, 'j_first': result.j_first, 'mu1': result.mu1}


def _report(config):
    options = config.options
    table = regime_table(options['dims'], options['deltas'], trace=options['trace'], workers=config.workers)
    return table, {'rows': len(table)}


HANDLERS = {
    'bifurcate': _bifurcate,
    'exact-verify': _exact_verify,
    'phase': _phase,
    'picard': _picard,
    'critical': _critical,
    'mu1': _mu1,
    'report': _report,
}


def _emit(config, frame, summary):
    if frame is not None and config.format == 'json':
        summary['data'] = frame.to_dict(orient='list')
    if config.output_path is None:
        sys.stdout.write(json_text(summary))
        return
    csv_path, json_path = config.paths
    if frame is not None and config.format == 'csv':
        write_csv_file(frame, csv_path)
    write_json_file(summary, json_path)


def _emit_error(config, err):
    record = {'error': {'type': type(err).__name__, 'message': str(err)}}
    if config is None or config.output_path is None:
        sys.stdout.write(json_text(record))
    else:
        write_json_file(record, config.paths[1])


def run(config):
    """Execute one command

    Parameters
    ----------
    config : RunConfig

    Returns
    -------
    int
        0 on success, 1 on invalid input, 2 on a numerical failure
    """
    try:
        frame, summary = HANDLERS[config.command](config)
    except ValueError as err:
        logger.error('%s: %s', type(err).__name__, err)
        _emit_error(config, err)
        return 1
    except RuntimeError as err:
        logger.error('%s: %s', type(err).__name__, err)
        _emit_error(config, err)
        return 2
    summary['command'] = config.command
    summary['tolerances'] = dict(config.tolerances)
    _emit(config, frame, summary)
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = config_from_args(args)
    except ValueError as err:
        _emit_error(None, err)
        sys.exit(1)

    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')
    sys.exit(run(config))
