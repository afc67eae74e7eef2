"""Command handlers of the hhk command line.

Exit codes: 0 success, 1 invalid argument or IO error, 2 scan violations,
3 boundary contact, 4 undecided certificate, 5 a verification tolerance
was missed.
"""
import logging
from enum import Enum
from typing import Optional

import numpy as np
import typer

from app.exceptions import HedgehogError
from app.services import projection_index, scan_service, support_field
from app.services.certify import CurvNumerator, Radicand, certify_sign
from app.services.mesh_generation import build_mesh
from app.services.report_export import export_report, write_obj
from app.services.sphere_math import as_unit_vec, sph_grid
from app.services.verification_service import CERTIFICATE_EXIT, SPOT_CHECK_FIELD, run_verification
from utils.file_utils import resolve_output_path
from utils.json_utils import write_json
from utils.pydantic_schema import RunConfig
from utils.validation import (
    validate_count, validate_format, validate_margin, validate_output_path, validate_t, validate_vector,
)

logger = logging.getLogger('commands')


class Quantity(str, Enum):
    curvature = "curvature"
    radii = "radii"


class Expression(str, Enum):
    radicand = "radicand"
    curvature = "curvature"


class MeshSurface(str, Enum):
    mm = "mm"
    crosscap = "crosscap"
    basegraph = "basegraph"


class IndexField(str, Enum):
    sphere = "sphere"
    perturbed = "perturbed"
    offset = "offset"


INDEX_FIELDS = {
    'sphere': support_field.Constant(1.0),
    'perturbed': SPOT_CHECK_FIELD,
    # radii of both signs
    'offset': support_field.SumOfFields((
        support_field.Constant(0.2),
        support_field.TrigPolynomial({(3, 0, 0): 1.0, (0, 2, 1): -0.5}),
    )),
}


def _fail(message):
    logger.error(message)
    typer.echo(f"Error: {message}", err=True)
    raise typer.Exit(code=1)


def _checked(result):
    value, error = result
    if error:
        _fail(error)
    return value


def _start_run(subcommand, t_value, path, fmt='json', **fields):
    run = RunConfig(subcommand=subcommand, t=float(t_value), t_literal=str(t_value), output=path, format=fmt, **fields)
    logger.info(f"Run {run.model_dump_json(exclude_none=True)}")
    return run


def _output_path(output, subcommand, fmt, config_class):
    try:
        path = resolve_output_path(output, subcommand, fmt, config_class.RESULTS_FOLDER)
    except HedgehogError as e:
        _fail(str(e))
    error = validate_output_path(path, {fmt})
    if error:
        _fail(error)
    return path


def register_commands(cli, config_class):
    """Attach the hhk subcommands to a typer application."""

    @cli.command()
    def scan(
        t: str = typer.Option(config_class.DEFAULT_T, help="Surface parameter, decimal or ratio such as 1/12."),
        n: int = typer.Option(config_class.DEFAULT_N, help="Grid resolution per axis."),
        margin: float = typer.Option(config_class.DEFAULT_MARGIN, help="Keep points with 1-|x|^(4/5)-|y|^(4/5) >= margin."),
        quantity: Quantity = typer.Option(Quantity.curvature, help="Scanned quantity."),
        t_range: bool = typer.Option(False, "--t-range", help="Curvature scans over the configured t values (JSON)."),
        output: Optional[str] = typer.Option(None, help="Output file."),
        fmt: Optional[str] = typer.Option(None, "--format", help="csv or json; json only with --t-range."),
    ):
        """Scan Gaussian curvature or principal radii on both sheets."""
        t_value = _checked(validate_t(t))
        n = _checked(validate_count(n, min_val=config_class.MIN_SCAN_N, name="n"))
        margin = _checked(validate_margin(margin))
        allowed = {'json'} if t_range else {'csv', 'json'}
        fmt = _checked(validate_format(fmt or ('json' if t_range else 'csv'), allowed))
        path = _output_path(output, 'scan', fmt, config_class)
        options = {'quantity': quantity.value, 't_range': list(config_class.T_SCAN_VALUES) if t_range else None}
        _start_run('scan', t_value, path, fmt, n=n, margin=margin, options=options)
        if t_range:
            try:
                result = scan_service.t_interval_scan(config_class.T_SCAN_VALUES, n, margin,
                                                      n_jobs=config_class.HHK_THREADS)
                write_json(result, path)
            except HedgehogError as e:
                _fail(str(e))
            typer.echo(f"K < 0 for t in {result.negative_ts} -> {path}")
            raise typer.Exit(code=0)
        try:
            if quantity == Quantity.curvature:
                report = scan_service.curvature_scan(t_value, n, margin, n_jobs=config_class.HHK_THREADS)
            else:
                report = scan_service.shape_radii_scan(t_value, n, margin, n_jobs=config_class.HHK_THREADS)
            export_report(report, path, fmt)
        except HedgehogError as e:
            _fail(str(e))
        typer.echo(f"{report.samples} samples, {report.violation_count} violation(s) -> {path}")
        raise typer.Exit(code=2 if report.violation_count else 0)

    @cli.command()
    def certify(
        expr: Expression = typer.Option(Expression.radicand, help="Expression to certify."),
        t: str = typer.Option(config_class.DEFAULT_T, help="Surface parameter for the curvature expression."),
        sheet: int = typer.Option(1, help="Sheet (+1 or -1) for the curvature expression."),
        margin: Optional[float] = typer.Option(None, help="Domain margin; defaults to 0 for the radicand."),
        depth: int = typer.Option(config_class.DEFAULT_DEPTH, help="Maximum subdivision depth."),
        budget: int = typer.Option(config_class.DEFAULT_BUDGET, help="Maximum number of boxes."),
        output: Optional[str] = typer.Option(None, help="Certificate JSON file."),
    ):
        """Certify the sign of the radicand (>= 0) or of the curvature numerator (< 0)."""
        t_value = _checked(validate_t(t))
        if margin is None:
            margin = 0.0 if expr == Expression.radicand else config_class.CURVATURE_CERT_MARGIN
        margin = _checked(validate_margin(margin, allow_zero=True))
        depth = _checked(validate_count(depth, min_val=0, max_val=config_class.MAX_DEPTH, name="depth"))
        budget = _checked(validate_count(budget, min_val=1, name="budget"))
        if sheet not in (1, -1):
            _fail(f"sheet must be +1 or -1, got {sheet}")
        path = _output_path(output, 'certify', 'json', config_class)
        _start_run('certify', t_value, path, margin=margin, max_depth=depth, budget=budget,
                   options={'expr': expr.value, 'sheet': sheet})
        try:
            if expr == Expression.radicand:
                cert = certify_sign(Radicand(), margin, '>=0', max_depth=depth, budget=budget)
            else:
                cert = certify_sign(CurvNumerator(t_value, sheet), margin, '<0', max_depth=depth, budget=budget)
            write_json(cert, path)
        except HedgehogError as e:
            _fail(str(e))
        typer.echo(f"{cert.expr} {cert.sign} on {cert.region}: {cert.verdict} ({cert.boxes} boxes) -> {path}")
        raise typer.Exit(code=CERTIFICATE_EXIT[cert.verdict])

    @cli.command()
    def mesh(
        surface: MeshSurface = typer.Option(MeshSurface.mm, help="Surface to triangulate."),
        t: str = typer.Option(config_class.DEFAULT_T, help="Surface parameter for the mm surface."),
        n: int = typer.Option(128, help="Mesh resolution."),
        output: Optional[str] = typer.Option(None, help="OBJ file."),
    ):
        """Write an OBJ mesh of the glued surface, the cross-cap or the base graph."""
        t_value = _checked(validate_t(t))
        n = _checked(validate_count(n, min_val=3, name="n"))
        path = _output_path(output, 'mesh', 'obj', config_class)
        _start_run('mesh', t_value, path, 'obj', n=n, options={'surface': surface.value})
        try:
            data = build_mesh(surface.value, t_value, n)
            write_obj(data, path, comment=f"hhk mesh surface={surface.value} t={t} n={n}")
        except HedgehogError as e:
            _fail(str(e))
        typer.echo(f"{len(data.vertices)} vertices, {len(data.faces)} faces -> {path}")
        raise typer.Exit(code=0)

    @cli.command()
    def index(
        field: IndexField = typer.Option(IndexField.sphere, help="Built-in support function."),
        direction: str = typer.Option("0,0,1", help="Hemisphere direction n as 'a,b,c'."),
        x: str = typer.Option("0.3,0.2", help="Query point in the plane normal to n as 'a,b'."),
        samples: int = typer.Option(4096, help="Angular samples of the projected curve."),
        resolution: int = typer.Option(32, help="Latitude count of the hemisphere grid."),
        output: Optional[str] = typer.Option(None, help="Result JSON file."),
    ):
        """Index of a point for the projected hedgehog and its elliptic/hyperbolic preimage counts."""
        n_vec = _checked(validate_vector(direction, 3))
        point = np.asarray(_checked(validate_vector(x, 2)))
        samples = _checked(validate_count(samples, min_val=16, name="samples"))
        resolution = _checked(validate_count(resolution, min_val=2, name="resolution"))
        path = _output_path(output, 'index', 'json', config_class)
        try:
            n_unit = as_unit_vec(n_vec, normalize=True)
            source = INDEX_FIELDS[field.value]
            curve = support_field.restrict_to_circle(source, n_unit)
            result = projection_index.ray_index(curve, point, n_samples=samples)
            counts = projection_index.theorem1_counts(
                source, n_unit, point, sph_grid(resolution, 2 * resolution, hemisphere=n_unit))
            document = {'field': field.value, 'n': n_unit.tolist(), 'index': result.model_dump(),
                        'counts': {**counts.model_dump(), 'index': counts.index},
                        'agrees': result.index == counts.index}
            write_json(document, path)
        except HedgehogError as e:
            _fail(str(e))
        typer.echo(f"index {result.index}, nu+ {counts.nu_plus}, nu- {counts.nu_minus} -> {path}")
        agrees = result.index == counts.index or result.degenerate or counts.degenerate
        raise typer.Exit(code=0 if agrees else 5)

    @cli.command()
    def verify(
        quick: bool = typer.Option(True, "--quick/--full", help="Quick or full preset."),
        t: str = typer.Option(config_class.DEFAULT_T, help="Surface parameter."),
        seed: int = typer.Option(config_class.DEFAULT_SEED, help="Seed of the randomized audits."),
        output: Optional[str] = typer.Option(None, help="Verdict JSON file."),
    ):
        """Run the whole verification pipeline and write one verdict document."""
        t_value = _checked(validate_t(t))
        path = _output_path(output, 'verify', 'json', config_class)
        _start_run('verify', t_value, path, seed=seed, options={'preset': 'quick' if quick else 'full'})
        try:
            report = run_verification(config_class, 'quick' if quick else 'full', t_literal=str(t_value), seed=seed)
            write_json(report, path)
        except HedgehogError as e:
            _fail(str(e))
        for stage in report.stages:
            typer.echo(f"{stage.name:<22} {'ok' if stage.passed else 'FAILED'} ({stage.seconds:.1f}s)")
        typer.echo(f"exit {report.exit_code} -> {path}")
        raise typer.Exit(code=report.exit_code)

    return cli
