"""
Command-line interface.

    subfactor-lab markov|tower|basis|verify|extend-aut|multistep <spec> [options]
    subfactor-lab catalog

<spec> is a spec-file path or a catalog entry name. Exit codes: 0 all checks
pass, 1 at least one check fails, 2 input error.
"""
import csv
import io
import json
import logging
import sys
from functools import wraps
from pathlib import Path

import click

from subfactor_lab.algebra.automorphisms import extend_tower, extension_report, random_n_invariant
from subfactor_lab.algebra.bases import watatani_index
from subfactor_lab.algebra.multistep import e_interval, fvrt_check, temperley_lieb_residuals
from subfactor_lab.algebra.tower import Tower, feasible_depth
from subfactor_lab.catalog import catalog_names, load_entry, resolve_spec
from subfactor_lab.config import get_config
from subfactor_lab.errors import (
    DepthError, InclusionError, PreconditionError, SpecParseError, StructuralError,
    SubfactorLabError)
from subfactor_lab.models.report import SuiteResult, VerificationReport, render
from subfactor_lab.models.serializer import to_jsonable
from subfactor_lab.suites import build_context, choose_depth, registry, run_suites
from subfactor_lab.suites.multistep import interval_pairs
from subfactor_lab.tasks import run_distributed
from subfactor_lab.utils.cache import get_cache

logger = logging.getLogger(__name__)

INPUT_ERRORS = (SpecParseError, InclusionError, DepthError, StructuralError, PreconditionError)


def handle_errors(f):
    """Map library errors onto exit codes: 2 for input errors, 1 for everything else."""
    @wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except INPUT_ERRORS as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(2)
        except SubfactorLabError as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(1)
    return wrapper


def common_options(f):
    options = [
        click.argument('spec'),
        click.option('--depth', type=click.IntRange(min=0), default=None,
                     help='Tower depth (default: spec file, else the configured default)'),
        click.option('--seed', type=int, default=None, help='Seed for every randomized check'),
        click.option('--tol', type=float, default=None, help='Relative residual tolerance'),
        click.option('--json', 'as_json', is_flag=True, help='Emit JSON instead of a table'),
        click.option('--output', type=click.Path(dir_okay=False), default=None,
                     help='Write the report to a file (.json or .csv selects the format)'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _format(as_json, output):
    if output:
        suffix = Path(output).suffix.lower()
        if suffix in ('.json', '.csv'):
            return suffix[1:]
    return 'json' if as_json else 'table'


def _dict_text(payload, indent=0):
    lines = []
    pad = '  ' * indent
    for key, value in payload.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.append(_dict_text(value, indent + 1))
        else:
            lines.append(f"{pad}{key}: {to_jsonable(value)}")
    return '\n'.join(lines)


def _dict_csv(payload):
    output = io.StringIO()
    writer = csv.writer(output)
    writer.writerow(['Key', 'Value'])
    for key, value in payload.items():
        writer.writerow([key, json.dumps(to_jsonable(value), ensure_ascii=False)])
    csv_data = output.getvalue()
    output.close()
    return csv_data


def emit(payload, as_json=False, output=None, text=None):
    """Print or write a VerificationReport or a plain dict."""
    fmt = _format(as_json, output)
    if isinstance(payload, VerificationReport):
        rendered = render(payload, fmt)
    elif fmt == 'json':
        rendered = json.dumps(to_jsonable(payload), indent=2, ensure_ascii=False)
    elif fmt == 'csv':
        rendered = _dict_csv(payload)
    else:
        rendered = text if text is not None else _dict_text(payload)
    if output:
        Path(output).write_text(rendered + ('' if rendered.endswith('\n') else '\n'), encoding='utf-8')
        click.echo(f"Report written to {output}", err=True)
    else:
        click.echo(rendered)


def _settings(seed, tol):
    config = get_config()
    return (config.SEED if seed is None else seed), (config.TOLERANCE if tol is None else tol)


@click.group()
@click.option('-v', '--verbose', count=True, help='-v for info logging, -vv for debug logging')
def cli(verbose):
    """Multi-matrix inclusions, Jones towers, Pimsner-Popa bases and their verification."""
    config = get_config()
    level = {0: config.LOG_LEVEL, 1: 'INFO'}.get(verbose, 'DEBUG')
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )


@cli.command()
@common_options
@handle_errors
def markov(spec, depth, seed, tol, as_json, output):
    """Markov trace of the inclusion: ‖G‖², τ and the trace vectors."""
    spec = resolve_spec(spec)
    inclusion = spec.inclusion()
    payload = {'name': spec.name, **inclusion.to_dict(), **inclusion.markov.to_dict()}
    payload['feasible_depth'] = feasible_depth(inclusion)
    emit(payload, as_json, output)


def _tower_text(payload):
    lines = [f"{payload['name']}  τ = {payload['tau']:.12g}  depth = {payload['depth']}", '']
    lines.append(f"{'level':>5}  {'dim':>6}  {'predicted':>9}  blocks")
    for entry in payload['levels']:
        lines.append(
            f"{entry['level']:>5}  {entry['dim']:>6}  {entry['predicted_dim']:>9}  "
            f"{list(entry['block_dims'])}")
    for entry in payload['levels']:
        if entry['inclusion_from_previous'] is not None:
            matrix = to_jsonable(entry['inclusion_from_previous'])
            lines.append(f"inclusion of level {entry['level'] - 1} in level {entry['level']}: {matrix}")
    if payload['temperley_lieb']:
        lines.append('')
        for name, value in payload['temperley_lieb'].items():
            lines.append(f"temperley-lieb {name}: {value:.3e}")
    return '\n'.join(lines)


@cli.command()
@common_options
@handle_errors
def tower(spec, depth, seed, tol, as_json, output):
    """Build the tower and report every level with its block structure."""
    spec = resolve_spec(spec)
    seed, tol = _settings(seed, tol)
    inclusion = spec.inclusion()
    depth = choose_depth(inclusion, depth, spec.depth)
    built = Tower(inclusion, depth=depth, seed=seed, tol=tol)
    predicted = built.predicted_dims()
    levels = []
    for k in range(-1, depth + 1):
        structure = built.block_structure(k, with_next=False)
        levels.append({
            'level': k,
            'dim': built.dim(k),
            'predicted_dim': predicted[k],
            'block_dims': structure.block_dims,
            'multiplicities': structure.multiplicities,
            'inclusion_from_previous': structure.inclusion_from_previous,
        })
    residuals = temperley_lieb_residuals(built) if depth >= 1 else {}
    payload = {
        'name': spec.name,
        'tau': built.tau,
        'depth': depth,
        'feasible_depth': feasible_depth(inclusion),
        'levels': levels,
        'temperley_lieb': residuals,
    }
    emit(payload, as_json, output, text=_tower_text(to_jsonable(payload)))
    mismatched = any(entry['dim'] != entry['predicted_dim'] for entry in levels)
    sys.exit(1 if mismatched or any(v > tol for v in residuals.values()) else 0)


@cli.command()
@common_options
@handle_errors
def basis(spec, depth, seed, tol, as_json, output):
    """Construct a basis of M over N and check the three equivalent conditions."""
    spec = resolve_spec(spec)
    seed, tol = _settings(seed, tol)
    inclusion = spec.inclusion()
    depth = choose_depth(inclusion, 1 if depth is None else depth)
    built = Tower(inclusion, depth=max(depth, 1), seed=seed, tol=tol)
    constructed = built.basis(0)
    checked = constructed.verify(tol, seed=seed)
    residuals = dict(checked.residuals)
    residuals['watatani'] = constructed.watatani_residual()
    details = {
        'n': constructed.n,
        'tau': built.tau,
        'index': to_jsonable(watatani_index(constructed).blocks),
        'skipped': checked.skipped,
    }
    if constructed.n <= 16:
        details['elements'] = [to_jsonable(lam.blocks) for lam in constructed.elements]
    result = SuiteResult('basis', "constructed basis of M over N", tol, residuals, details)
    report = VerificationReport(spec.name, seed, built.depth, tol, [result])
    emit(report, as_json, output)
    sys.exit(report.exit_code)


@cli.command()
@common_options
@click.argument('suites', nargs=-1)
@click.option('--distributed', is_flag=True, help='Run every suite as a Celery task')
@click.option('--no-cache', is_flag=True, help='Do not read or write cached suite results')
@handle_errors
def verify(spec, suites, depth, seed, tol, as_json, output, distributed, no_cache):
    """Run verification suites (all by default) and exit 0 iff every suite passes."""
    try:
        names = registry.resolve(suites)
    except PreconditionError as e:
        raise click.UsageError(str(e))
    spec = resolve_spec(spec)
    seed, tol = _settings(seed, tol)
    if distributed:
        depth = choose_depth(spec.inclusion(), depth, spec.depth)
        from subfactor_lab.worker import celery_tasks
        report = run_distributed(celery_tasks, spec, names, depth, seed, tol)
    else:
        cache = None if no_cache else get_cache()
        context = build_context(spec, depth=depth, seed=seed, tol=tol, cache=cache)
        report = run_suites(context, names)
    emit(report, as_json, output)
    sys.exit(report.exit_code)


@cli.command('extend-aut')
@common_options
@handle_errors
def extend_aut(spec, depth, seed, tol, as_json, output):
    """Extend the spec file's automorphism (or a random N-invariant one) up the tower."""
    spec = resolve_spec(spec)
    seed, tol = _settings(seed, tol)
    inclusion = spec.inclusion()
    depth = max(choose_depth(inclusion, depth, spec.depth), 1)
    built = Tower(inclusion, depth=depth, seed=seed, tol=tol)
    alpha0 = spec.automorphism(built.inclusion)
    source = 'spec file'
    if alpha0 is None:
        alpha0 = random_n_invariant(built.inclusion, seed)
        source = f'random (seed {seed})'
    if not alpha0.n_invariant:
        raise PreconditionError("the automorphism does not leave N invariant")
    alpha = extend_tower(built, alpha0, depth, tol)
    report = VerificationReport(spec.name, seed, depth, tol)
    for k in range(0, depth + 1):
        checked = extension_report(alpha, k, seed=seed, tol=tol)
        report.suites.append(SuiteResult(
            f"level {k}", f"α_{k} is a trace-preserving *-automorphism extending α_{k - 1}",
            tol, checked.residuals, {'automorphism': source, 'sigma': alpha0.sigma}))
    emit(report, as_json, output)
    sys.exit(report.exit_code)


@cli.command()
@common_options
@click.option('-k', 'k', type=click.IntRange(min=-1), default=None, help='Bottom level k')
@click.option('-m', 'm', type=click.IntRange(min=1), default=None, help='Number of steps m')
@handle_errors
def multistep(spec, k, m, depth, seed, tol, as_json, output):
    """Check that level k ⊆ level k+m ⊆ level k+2m is a basic construction via e_[k,k+m]."""
    spec = resolve_spec(spec)
    seed, tol = _settings(seed, tol)
    inclusion = spec.inclusion()
    if depth is None and k is not None and m is not None:
        depth = k + 2 * m
    depth = choose_depth(inclusion, depth, spec.depth)
    built = Tower(inclusion, depth=depth, seed=seed, tol=tol)
    pairs = [
        (a, b) for a, b in interval_pairs(depth)
        if (k is None or a == k) and (m is None or b == m)
    ]
    if k is not None and m is not None:
        pairs = [(k, m)]
    if not pairs:
        raise DepthError(f"no (k, m) pair fits in depth {depth}", available=depth)
    report = VerificationReport(spec.name, seed, depth, tol)
    for a, b in pairs:
        projection = e_interval(built, a, b, tol=float('inf'))
        checked = fvrt_check(built, a, b, seed=seed, tol=tol)
        residuals = {'projection': projection.projection_residual, **checked.residuals}
        details = dict(checked.details, exponent=projection.exponent)
        report.suites.append(SuiteResult(
            f"e_[{a},{a + b}]", f"level {a} ⊆ level {a + b} ⊆ level {a + 2 * b} is a basic construction",
            tol, residuals, details))
    emit(report, as_json, output)
    sys.exit(report.exit_code)


@cli.command()
@click.option('--json', 'as_json', is_flag=True, help='Emit JSON instead of a table')
@handle_errors
def catalog(as_json):
    """List the catalog entries."""
    entries = []
    for name in catalog_names():
        spec = load_entry(name)
        inclusion = spec.inclusion()
        entries.append({
            'name': name,
            'dims_N': spec.dims_N,
            'dims_M': spec.dims_M,
            'G': spec.G,
            'tau': inclusion.markov.tau,
            'feasible_depth': feasible_depth(inclusion),
        })
    if as_json:
        click.echo(json.dumps(to_jsonable(entries), indent=2, ensure_ascii=False))
        return
    for entry in entries:
        click.echo(
            f"{entry['name']:<4} N={list(entry['dims_N'])} M={list(entry['dims_M'])} "
            f"G={[list(row) for row in entry['G']]} τ={entry['tau']:.6g} "
            f"feasible depth {entry['feasible_depth']}")


def main():
    cli(prog_name='subfactor-lab')


if __name__ == '__main__':
    main()
