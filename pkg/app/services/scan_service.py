import logging
import time

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from app.exceptions import InvalidArgumentError
from app.services.graph_surface import GraphSurfaceSpec, curvature_arrays
from config import Config
from utils.pydantic_schema import CurvatureSample, ScanReport, TIntervalReport, TScanEntry

logger = logging.getLogger('scan_service')

SCAN_COLUMNS = ['x', 'y', 'sheet', 'z', 'K', 'r1', 'r2', 'Rh', 'boundary_distance']


def _validate_scan_params(n, margin):
    if int(n) < Config.MIN_SCAN_N:
        raise InvalidArgumentError(f"Scan resolution must be at least {Config.MIN_SCAN_N}, got {n}")
    if not 0.0 < float(margin) < 1.0:
        raise InvalidArgumentError(f"Scan margin must lie in (0, 1), got {margin}")


def _scan_chunk(spec, xs, ys, margin):
    """Curvature table for one block of grid rows on one sheet."""
    xx, yy = np.meshgrid(xs, ys, indexing='xy')
    xx, yy = xx.ravel(), yy.ravel()
    distance = spec.domain(xx, yy)
    inside = distance >= margin
    xx, yy, distance = xx[inside], yy[inside], distance[inside]
    if len(xx) == 0:
        return pd.DataFrame(columns=SCAN_COLUMNS + ['K_numerator', 'nx', 'ny', 'nz'])

    data = curvature_arrays(spec, xx, yy)
    normal = np.broadcast_to(data['normal'], (len(xx), 3))
    with np.errstate(invalid='ignore', over='ignore'):
        rh = data['r1'] * data['r2']
    return pd.DataFrame({
        'x': xx, 'y': yy, 'sheet': np.full(len(xx), spec.eps, dtype=int),
        'z': data['z'], 'K': data['K'], 'r1': data['r1'], 'r2': data['r2'], 'Rh': rh,
        'boundary_distance': distance,
        'K_numerator': np.broadcast_to(data['K_numerator'], xx.shape),
        'nx': normal[:, 0], 'ny': normal[:, 1], 'nz': normal[:, 2],
    })


def scan_table(specs, n, margin, n_jobs=None):
    """Evaluate every spec on the n x n grid of [-1, 1]^2, keeping points with domain value >= margin.

    Rows are split into chunks evaluated on joblib threads and merged in
    chunk order, so the table does not depend on the worker count.
    """
    grid = np.linspace(-1.0, 1.0, int(n))
    workers = max(1, min(int(n_jobs or Config.HHK_THREADS), len(grid)))
    row_chunks = np.array_split(grid, max(workers * 4, 1))
    tasks = [(spec, chunk) for spec in specs for chunk in row_chunks if len(chunk)]

    logger.debug(f"Scanning {len(specs)} sheet(s) at n={n} with {workers} worker(s) in {len(tasks)} chunks")
    frames = Parallel(n_jobs=workers, prefer="threads")(
        delayed(_scan_chunk)(spec, grid, chunk, margin) for spec, chunk in tasks
    )
    frames = [frame for frame in frames if not frame.empty]
    if not frames:
        return pd.DataFrame(columns=SCAN_COLUMNS + ['K_numerator', 'nx', 'ny', 'nz'])
    return pd.concat(frames, ignore_index=True)


def _sample_from_row(row):
    return CurvatureSample(
        x=float(row.x), y=float(row.y), sheet=int(row.sheet), z=float(row.z),
        K_numerator=float(row.K_numerator), K=float(row.K), r1=float(row.r1), r2=float(row.r2),
        normal=(float(row.nx), float(row.ny), float(row.nz)),
        boundary_distance=float(row.boundary_distance),
    )


def _build_report(quantity, surface, t, n, margin, table, seconds, violation_mask):
    violations = table[violation_mask].sort_values(['x', 'y', 'sheet'], kind='mergesort')
    capped = violations.head(Config.VIOLATION_CAP)
    finite_r = table[np.isfinite(table['r1']) & np.isfinite(table['r2'])]
    negative = table['K'] < 0.0
    mismatches = int((negative & ~((table['r1'] < 0.0) & (table['r2'] > 0.0))).sum())
    values = table['K'] if quantity == 'curvature' else table['Rh']

    return ScanReport(
        quantity=quantity, surface=surface, t=t, resolution=int(n), margin=float(margin),
        samples=len(table),
        min_value=float(values.min()) if len(table) else None,
        max_value=float(values.max()) if len(table) else None,
        min_r1=float(finite_r['r1'].min()) if len(finite_r) else None,
        max_r1=float(finite_r['r1'].max()) if len(finite_r) else None,
        min_r2=float(finite_r['r2'].min()) if len(finite_r) else None,
        max_r2=float(finite_r['r2'].max()) if len(finite_r) else None,
        sign_mismatches=mismatches,
        violation_count=len(violations),
        violations=[_sample_from_row(row) for row in capped.itertuples(index=False)],
        seconds=seconds,
        table=table[SCAN_COLUMNS].reset_index(drop=True),
    )


def _mm_specs(t):
    return [GraphSurfaceSpec.mm(t, 1), GraphSurfaceSpec.mm(t, -1)]


def curvature_scan(t, n, margin, n_jobs=None):
    """Gaussian curvature on both sheets; every sample with K >= 0 is a violation."""
    _validate_scan_params(n, margin)
    start = time.perf_counter()
    table = scan_table(_mm_specs(t), n, margin, n_jobs=n_jobs)
    report = _build_report('curvature', 'mm', float(t), n, margin, table,
                           time.perf_counter() - start, table['K'] >= 0.0)
    logger.info(f"Curvature scan t={float(t):.6g} n={n}: {report.samples} samples, "
                f"max K {report.max_value}, {report.violation_count} violation(s)")
    return report


def shape_radii_scan(t, n, margin, spec=None, n_jobs=None):
    """Principal radii scan. Violations are samples with r1 r2 >= 0.

    Without ``spec`` both sheets of the counterexample at ``t`` are scanned.
    """
    _validate_scan_params(n, margin)
    start = time.perf_counter()
    specs = _mm_specs(t) if spec is None else [spec]
    table = scan_table(specs, n, margin, n_jobs=n_jobs)
    surface = 'mm' if spec is None else spec.kind
    report = _build_report('radii', surface, None if t is None else float(t), n, margin, table,
                           time.perf_counter() - start, ~(table['Rh'] < 0.0))
    if report.sign_mismatches:
        logger.warning(f"{report.sign_mismatches} sample(s) with K < 0 but not r1 < 0 < r2")
    logger.info(f"Radii scan {surface} n={n}: r1 in [{report.min_r1}, {report.max_r1}], "
                f"r2 in [{report.min_r2}, {report.max_r2}]")
    return report


def t_interval_scan(ts=None, n=128, margin=1e-3, n_jobs=None):
    """Curvature scans over a list of t; reports the t values with strictly negative curvature."""
    ts = list(Config.T_SCAN_VALUES if ts is None else ts)
    if not ts:
        raise InvalidArgumentError("t_interval_scan needs at least one t value")
    entries = []
    for t in ts:
        report = curvature_scan(t, n, margin, n_jobs=n_jobs)
        entries.append(TScanEntry(t=float(t), max_K=report.max_value, violation_count=report.violation_count))
    negative = [entry.t for entry in entries if entry.violation_count == 0]
    result = TIntervalReport(entries=entries, negative_ts=negative,
                             lower=min(negative) if negative else None,
                             upper=max(negative) if negative else None)
    logger.info(f"t-interval scan: negative curvature for t in {negative}")
    return result
