import logging
import time
from fractions import Fraction

import numpy as np

from app.exceptions import HedgehogError, OnCurveError, ParabolicAmbiguityError
from app.services import graph_surface, scan_service
from app.services.certify import CurvNumerator, Radicand, certify_sign
from app.services.projection_index import ray_index, theorem1_counts
from app.services.sphere_math import sph_grid
from app.services.support_field import Constant, SumOfFields, TrigPolynomial, restrict_to_circle
from utils.pydantic_schema import StageResult, VerificationReport

logger = logging.getLogger('verification')

EXIT_OK = 0
EXIT_VIOLATIONS = 2
EXIT_BOUNDARY_CONTACT = 3
EXIT_UNDECIDED = 4
EXIT_TOLERANCE = 5

CERTIFICATE_EXIT = {'Certified': EXIT_OK, 'BoundaryContact': EXIT_BOUNDARY_CONTACT, 'Undecided': EXIT_UNDECIDED}

# convex test body for the projection spot checks
SPOT_CHECK_FIELD = SumOfFields((
    Constant(1.0),
    TrigPolynomial({(2, 0, 0): 0.1, (0, 1, 1): 0.05, (1, 0, 0): 0.2}),
))
SPOT_CHECK_DIRECTION = (0.2, 0.1, 1.0)

SHIFTED_RADIUS_TOLERANCE = 1e-9
IDENTITY_TOLERANCE = 1e-14


def preset_parameters(config_class, preset):
    if preset == 'full':
        return config_class.FULL_N, config_class.FULL_DEPTH, config_class.FULL_BUDGET
    return config_class.QUICK_N, config_class.QUICK_DEPTH, config_class.QUICK_BUDGET


def _run_stage(name, func):
    """Run one stage; HedgehogErrors fail the stage with their own exit code."""
    start = time.perf_counter()
    logger.info(f"Stage {name} started")
    try:
        passed, exit_code, detail = func()
    except HedgehogError as e:
        logger.error(f"Stage {name} raised {type(e).__name__}: {e}")
        passed, exit_code, detail = False, e.exit_code, {'error': type(e).__name__, 'message': str(e)}
    seconds = time.perf_counter() - start
    level = logging.INFO if passed else logging.WARNING
    logger.log(level, f"Stage {name} {'passed' if passed else 'failed'} in {seconds:.2f}s")
    return StageResult(name=name, passed=passed, exit_code=EXIT_OK if passed else exit_code,
                       seconds=seconds, detail=detail)


def run_verification(config_class, preset='quick', t_literal=None, seed=None):
    """End-to-end check of the counterexample; the exit code is that of the first failing stage."""
    t_literal = t_literal or config_class.DEFAULT_T
    t = Fraction(t_literal)
    seed = config_class.DEFAULT_SEED if seed is None else int(seed)
    n, depth, budget = preset_parameters(config_class, preset)
    margin = config_class.DEFAULT_MARGIN
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    logger.info(f"Verification ({preset}) t={t_literal} n={n} depth={depth} seed={seed}")

    def radicand_scan():
        grid = np.linspace(-1.0, 1.0, 2 * n)
        xx, yy = np.meshgrid(grid, grid)
        inside = graph_surface.boundary_distance(xx, yy) >= 0.0
        values = graph_surface.mm_radicand(xx[inside], yy[inside], clamp=False)
        minimum = float(np.min(values))
        return minimum >= -graph_surface.RADICAND_CLAMP, EXIT_TOLERANCE, {'min_radicand': minimum,
                                                                           'samples': int(inside.sum())}

    def curvature():
        report = scan_service.curvature_scan(t, n, margin)
        detail = {'samples': report.samples, 'max_K': report.max_value, 'violations': report.violation_count}
        return report.violation_count == 0, EXIT_VIOLATIONS, detail

    def radii():
        report = scan_service.shape_radii_scan(t, n, margin)
        r_star = graph_surface.convexify_radius(report)
        R = r_star + config_class.ALEXANDROV_SLACK
        check = graph_surface.alexandrov_check(report, R)
        # under the opposite orientation the radii negate
        r_star_opposite = max(0.0, float(report.max_r2)) if report.max_r2 is not None else None
        detail = {'min_r1': report.min_r1, 'max_r2': report.max_r2, 'sign_mismatches': report.sign_mismatches,
                  'convexify_radius': r_star, 'convexify_radius_opposite': r_star_opposite,
                  'alexandrov': check.model_dump()}
        passed = (report.sign_mismatches == 0 and report.violation_count == 0 and check.condition_holds
                  and check.min_shifted_r1 >= -SHIFTED_RADIUS_TOLERANCE and check.max_product < 0.0
                  and check.identity_defect <= IDENTITY_TOLERANCE)
        return passed, EXIT_TOLERANCE, detail

    def singular_set():
        report = graph_surface.singular_set_check(t, config_class.SINGULAR_SAMPLES)
        decay = graph_surface.singular_decay_scan(t)
        detail = {'max_distance': report.max_distance, 'max_distance_raw': report.max_distance_raw,
                  'cusp_normal_error': report.cusp_normal_error, 'paths': report.samples,
                  'min_abs_Rh_near_cusps': min(abs(s.R_h) for s in decay)}
        passed = (report.max_distance <= config_class.SINGULAR_SET_TOLERANCE
                  and report.cusp_normal_error <= config_class.CUSP_NORMAL_TOLERANCE)
        return passed, EXIT_TOLERANCE, detail

    def symmetry():
        defects = graph_surface.symmetry_defect(t, rng, count=200)
        return max(defects.values()) <= 1e-12, EXIT_TOLERANCE, defects

    def crosscap():
        uv = rng.uniform(-1.0, 1.0, size=(100, 2))
        x4y5 = max(abs(graph_surface.crosscap_residual(u, v, 'x4y5')) for u, v in uv)
        x5y5 = max(abs(graph_surface.crosscap_residual(u, v, 'x5y5')) for u, v in uv)
        detail = {'max_residual_x4y5': x4y5, 'max_residual_x5y5': x5y5}
        return x4y5 <= config_class.CROSSCAP_TOLERANCE, EXIT_TOLERANCE, detail

    def projection_index():
        direction = np.asarray(SPOT_CHECK_DIRECTION) / np.linalg.norm(SPOT_CHECK_DIRECTION)
        grid = sph_grid(32, 64, hemisphere=direction)
        curve = restrict_to_circle(SPOT_CHECK_FIELD, direction)
        compared = excluded = mismatches = 0
        for x in rng.uniform(-1.6, 1.6, size=(config_class.THEOREM1_POINTS, 2)):
            try:
                index = ray_index(curve, x, n_samples=1024)
                counts = theorem1_counts(SPOT_CHECK_FIELD, direction, x, grid)
            except (OnCurveError, ParabolicAmbiguityError):
                excluded += 1
                continue
            if index.degenerate or counts.degenerate:
                excluded += 1
                continue
            compared += 1
            if index.index != counts.index:
                mismatches += 1
                logger.warning(f"Index {index.index} != counts {counts.nu_plus}-{counts.nu_minus} at {x.tolist()}")
        detail = {'compared': compared, 'excluded': excluded, 'mismatches': mismatches}
        return compared > 0 and mismatches == 0, EXIT_TOLERANCE, detail

    def radicand_certificate():
        cert = certify_sign(Radicand(), 0.0, '>=0', max_depth=depth, budget=budget)
        return cert.verdict in ('Certified', 'BoundaryContact'), CERTIFICATE_EXIT[cert.verdict], cert.model_dump()

    def curvature_certificate():
        detail = {}
        exit_code = EXIT_OK
        for eps in (1, -1):
            cert = certify_sign(CurvNumerator(t, eps), config_class.CURVATURE_CERT_MARGIN, '<0',
                                max_depth=depth, budget=budget)
            detail[f"sheet{eps:+d}"] = cert.model_dump()
            if cert.verdict != 'Certified' and exit_code == EXIT_OK:
                exit_code = CERTIFICATE_EXIT[cert.verdict]
        return exit_code == EXIT_OK, exit_code, detail

    stages = [
        _run_stage('radicand_scan', radicand_scan),
        _run_stage('curvature_scan', curvature),
        _run_stage('shape_radii', radii),
        _run_stage('singular_set', singular_set),
        _run_stage('symmetry', symmetry),
        _run_stage('crosscap', crosscap),
        _run_stage('projection_index', projection_index),
        _run_stage('radicand_certificate', radicand_certificate),
        _run_stage('curvature_certificate', curvature_certificate),
    ]
    failed = [stage for stage in stages if not stage.passed]
    exit_code = failed[0].exit_code if failed else EXIT_OK
    report = VerificationReport(preset=preset, t=float(t), t_literal=str(t_literal), seed=seed,
                                passed=not failed, exit_code=exit_code, stages=stages,
                                seconds=time.perf_counter() - start)
    logger.info(f"Verification finished with exit code {exit_code} in {report.seconds:.1f}s")
    return report
