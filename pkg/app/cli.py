"""
Command line front end.

Subcommands: cluster, bounds, verify-mme, worker, master, quality. Every run
is determined by its flags, an optional JSON config file and the seed.
Results go to stdout (or --out); logs go to stderr.
"""

import os
import sys
import json
import logging
import argparse

import pandas as pd

from app.errors.exceptions import ConditionError, ConfigError
from app.utils import to_jsonable
from config import resolved_defaults

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--config', help='JSON file with settings; explicit flags take precedence')
    parser.add_argument('--print-config', action='store_true', help='Print the resolved configuration and exit')
    parser.add_argument('--threads', type=int, help='Worker threads, 0 for all cores')
    parser.add_argument('--seed', type=int, help='Seed for every random stream')
    parser.add_argument('--out', help='Output file (default: stdout)')
    parser.add_argument('-v', '--verbose', action='store_true', help='Debug logging')
    parser.add_argument('-q', '--quiet', action='store_true', help='Warnings and errors only')


def _search_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--input', required=True, help='CSV file with a header row')
    parser.add_argument('--columns', help='Comma separated column kinds: numeric, categorical, label, skip')
    parser.add_argument('--k', type=int, help='Number of medoids')
    parser.add_argument('--metric', help='l1, l2, squared_l2 or gower')
    parser.add_argument('--tau', type=float, help='Improvement margin')
    parser.add_argument('--n-start', type=int, dest='n_start', help='First sample size')
    parser.add_argument('--growth', type=int, help='Sample size growth factor')
    parser.add_argument('--n-max', type=int, dest='n_max', help='Largest sample size (default: dataset size)')
    parser.add_argument('--alpha', type=float, help='Confidence interval level')
    parser.add_argument('--practical-opts', action='store_const', const=True, dest='practical_opts',
                        help='Decide on point estimates instead of interval ends')
    parser.add_argument('--full-trace', action='store_const', const=True, dest='full_trace',
                        help='Include every inner round in the output')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='medoid-bounds', description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    commands = parser.add_subparsers(dest='command', required=True)

    cluster = commands.add_parser('cluster', help='Find k medoids of a CSV dataset')
    _common(cluster)
    _search_flags(cluster)
    cluster.add_argument('--algo', choices=('mcpam', 'pam', 'exhaustive'), help='Search algorithm')
    cluster.add_argument('--single', action='store_const', const=True,
                         help='Single-medoid search loop (k=1 only)')
    cluster.add_argument('--timing', action='store_true', help='Include the wall-clock runtime')

    bounds = commands.add_parser('bounds', help='Evaluate the error-bound calculus')
    _common(bounds)
    bounds.add_argument('--family', help='chi2, gaussian, a JSON object or a JSON file')
    bounds.add_argument('--c4', type=float, help='Berry-Esseen constant C4 (at most 32)')
    bounds.add_argument('--m', type=int, help='Number of means')
    bounds.add_argument('--p', type=float, help='Tolerance in percent')
    bounds.add_argument('--n', type=int, help='Samples per mean')
    bounds.add_argument('--delta-grid', dest='deltas', help='lo:hi:count or comma separated exceedances')

    verify = commands.add_parser('verify-mme', help='Monte Carlo check of the MME error against its bound')
    _common(verify)
    verify.add_argument('--family', help='chi2, gaussian, a JSON object or a JSON file')
    verify.add_argument('--kind', help='gaussian or noncentral_chisq1 (default from family)')
    verify.add_argument('--c4', type=float, help='Berry-Esseen constant C4 (at most 32)')
    verify.add_argument('--means', required=True, help='linspace:m:lo:hi or comma separated arm means')
    verify.add_argument('--n', required=True, help='Samples per arm; comma separated for a sweep')
    verify.add_argument('--trials', type=int, help='Trials per configuration')

    worker = commands.add_parser('worker', help='Serve one chunk to a master')
    _common(worker)
    worker.add_argument('--listen', help='host:port to listen on')

    master = commands.add_parser('master', help='Run MCPAM over remote workers')
    _common(master)
    _search_flags(master)
    master.add_argument('--workers', required=True, help='Comma separated host:port list')

    quality = commands.add_parser('quality', help='ARI and cost of a clustering result')
    _common(quality)
    quality.add_argument('--input', required=True, help='CSV file with a header row')
    quality.add_argument('--labels-col', dest='labels_col', default='label', help='Ground truth column')
    quality.add_argument('--result', required=True, help='MedoidResult JSON from the cluster command')
    quality.add_argument('--metric', help='l1, l2, squared_l2 or gower')
    return parser


def resolve(args: argparse.Namespace) -> tuple[dict, dict]:
    """
    (values, settings): request values from the config file overridden by
    explicit flags, and upper-case settings from config.py overridden by the
    file's upper-case keys.
    """
    settings = resolved_defaults()
    values = {}
    if args.config:
        try:
            with open(args.config, 'r', encoding='utf-8') as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Cannot read config file {args.config}: {e}") from None
        if not isinstance(data, dict):
            raise ConfigError("Config file must hold a JSON object")
        for key, value in data.items():
            (settings if key.isupper() else values)[key] = value
    skip = {'config', 'print_config', 'verbose', 'quiet', 'command', 'out', 'timing'}
    for key, value in vars(args).items():
        if key not in skip and value is not None:
            values[key] = value
    return values, settings


def _int_value(values: dict, key: str, default) -> int:
    value = values.get(key)
    try:
        return int(default if value is None else value)
    except (TypeError, ValueError):
        raise ConfigError(f"Invalid value for {key}: {value!r}") from None


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, 'w', encoding='utf-8') as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_json(body, out: str | None) -> None:
    _write(json.dumps(to_jsonable(body), indent=2, sort_keys=True) + '\n', out)


def _family_value(value):
    if isinstance(value, str) and value.strip().startswith('{'):
        return json.loads(value)
    if isinstance(value, str) and os.path.isfile(value):
        with open(value, 'r', encoding='utf-8') as fh:
            return json.load(fh)
    return value


def _load_input(values: dict):
    from app.ingest import load_csv

    decl = values.get('columns')
    if isinstance(decl, str):
        decl = [kind.strip() for kind in decl.split(',')]
    return load_csv(values['input'], decl)


def cmd_cluster(args, values: dict, settings: dict) -> int:
    from app.medoids.services import cluster_dataset

    body = cluster_dataset(_load_input(values), values, settings)
    if not args.timing:
        body.pop('runtime_ms', None)
    _write_json(body, args.out)
    return EXIT_OK


def cmd_bounds(args, values: dict, settings: dict) -> int:
    from app.bounds import services

    values['family'] = _family_value(values.get('family'))
    body = services.constants(values, settings)
    if 'p' in values:
        if 'm' not in values:
            raise ConfigError("--p needs --m")
        body['tolerance'] = services.tolerance(values, settings)['tolerance']
    if 'n' in values and 'm' in values:
        body['rate'] = services.rate(values, settings)
    if 'deltas' in values:
        if 'n' not in values:
            raise ConfigError("--delta-grid needs --n")
        rows = services.grid(values, settings)['rows']
        if args.out and args.out.endswith('.csv'):
            pd.DataFrame(rows).to_csv(args.out, index=False)
            return EXIT_OK
        body['grid'] = rows
    _write_json(body, args.out)
    return EXIT_OK


def cmd_verify_mme(args, values: dict, settings: dict) -> int:
    from app.bounds import services
    from app.bounds.bandits import with_verdicts

    values['family'] = _family_value(values.get('family'))
    fam, c = services.constants_for(values, settings)
    means = services.parse_means(values['means'])
    n_grid = [int(n) for n in services.parse_grid(str(values['n']))]
    trials = _int_value(values, 'trials', settings['BANDITS_TRIALS'])
    threads = _int_value(values, 'threads', 1)
    frame = services.verify_sweep(fam, services.kind_for(fam, values.get('kind')), means, n_grid, trials,
                                  _int_value(values, 'seed', settings['MEDOIDS_SEED']), c, threads=threads)
    _write(with_verdicts(frame).to_csv(index=False), args.out)
    return EXIT_OK


def cmd_worker(args, values: dict, settings: dict) -> int:
    from app.distributed.protocol import parse_endpoint
    from app.distributed.worker import serve

    host, port = parse_endpoint(values.get('listen') or settings['WORKER_LISTEN'])
    serve(host, port, threads=_int_value(values, 'threads', 1))
    return EXIT_OK


def cmd_master(args, values: dict, settings: dict) -> int:
    from app.distributed.master import master_run
    from app.medoids.services import mcpam_config_from, metric_from

    data = _load_input(values)
    cfg = mcpam_config_from(values, settings)
    metric = metric_from(values, settings)
    endpoints = [e.strip() for e in values['workers'].split(',') if e.strip()]
    result = master_run(cfg, endpoints, data, metric, timeout=settings.get('MASTER_TIMEOUT'))
    body = result.to_dict(full_trace=bool(values.get('full_trace')))
    body['config'] = cfg.to_dict()
    body['metric'] = metric.to_dict()
    body['workers'] = endpoints
    _write_json(body, args.out)
    return EXIT_OK


def cmd_quality(args, values: dict, settings: dict) -> int:
    from app.ingest import load_csv, quality_report
    from app.medoids.core import KTuple, Point
    from app.medoids.services import metric_from

    data = load_csv(values['input'], label_column=values['labels_col'])
    try:
        with open(values['result'], 'r', encoding='utf-8') as fh:
            result = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read result file {values['result']}: {e}") from None
    medoid = KTuple(tuple(Point.from_dict(slot) for slot in result['medoid']))
    if 'metric' not in values and isinstance(result.get('metric'), dict):
        values['metric'] = result['metric']['kind']
    report = quality_report(data, medoid, metric_from(values, settings),
                            runtime_ms=float(result.get('runtime_ms') or 0.0),
                            distance_evals=int(result.get('total_distance_evals') or 0))
    _write_json(report.to_dict(), args.out)
    return EXIT_OK


COMMANDS = {
    'cluster': cmd_cluster,
    'bounds': cmd_bounds,
    'verify-mme': cmd_verify_mme,
    'worker': cmd_worker,
    'master': cmd_master,
    'quality': cmd_quality,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(stream=sys.stderr, level=level,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    try:
        values, settings = resolve(args)
        if args.print_config:
            _write_json({'command': args.command, 'values': values, 'settings': settings}, args.out)
            return EXIT_OK
        return COMMANDS[args.command](args, values, settings)
    except (ConfigError, ConditionError) as e:
        logger.error("%s", e)
        for condition in getattr(e, 'diagnostics', []):
            if not condition.holds:
                logger.error("  failed %s: %r %s %r", condition.name, condition.lhs, condition.relation,
                             condition.rhs)
        return EXIT_USAGE
    except Exception as e:
        logger.error("%s: %s", type(e).__name__, e)
        logger.debug("Traceback", exc_info=True)
        return EXIT_FAILURE
