import logging

import numpy as np
import pandas as pd

from app.exceptions import InvalidArgumentError, OutputError
from utils.file_utils import cleanup_file, get_file_extension
from utils.json_utils import write_json

logger = logging.getLogger('report_export')

FLOAT_FORMAT = '%.17g'


def write_scan_csv(report, path):
    """Sample table of a scan, one row per (point, sheet), 17 significant digits."""
    if report.table is None:
        raise InvalidArgumentError("Scan report carries no sample table")
    try:
        report.table.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    except OSError as e:
        logger.error(f"Could not write CSV to {path}: {e}")
        cleanup_file(path)
        raise OutputError(f"Could not write {path}: {e}", path=str(path)) from e
    logger.info(f"Wrote {len(report.table)} rows to {path}")
    return path


def read_scan_csv(path):
    try:
        return pd.read_csv(path, float_precision='round_trip')
    except OSError as e:
        logger.error(f"Could not read CSV from {path}: {e}")
        raise OutputError(f"Could not read {path}: {e}", path=str(path)) from e


def write_obj(mesh, path, comment=None):
    """ASCII OBJ with v, vn and f records; face indices are 1-based and reuse vertex indices for normals."""
    vertices = np.asarray(mesh.vertices, dtype=float)
    normals = np.asarray(mesh.normals, dtype=float)
    faces = np.asarray(mesh.faces, dtype=np.int64) + 1
    try:
        with open(path, 'w', encoding='ascii', newline='\n') as obj:
            if comment:
                obj.write(f"# {comment}\n")
            obj.write(f"# {len(vertices)} vertices, {len(faces)} faces\n")
            obj.writelines(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n" for v in vertices)
            obj.writelines(f"vn {n[0]:.17g} {n[1]:.17g} {n[2]:.17g}\n" for n in normals)
            obj.writelines(f"f {a}//{a} {b}//{b} {c}//{c}\n" for a, b, c in faces)
    except OSError as e:
        logger.error(f"Could not write OBJ to {path}: {e}")
        cleanup_file(path)
        raise OutputError(f"Could not write {path}: {e}", path=str(path)) from e
    logger.info(f"Wrote mesh to {path}")
    return path


def read_obj_vertices(path):
    """Vertex coordinates of an OBJ file as an (n, 3) array."""
    rows = []
    with open(path, 'r', encoding='ascii') as obj:
        for line in obj:
            if line.startswith('v '):
                rows.append([float(v) for v in line.split()[1:4]])
    return np.array(rows, dtype=float)


def export_report(report, path, fmt=None):
    """Write a report in the requested format (csv for scans, json for any report).

    Without fmt the format follows the extension of path.
    """
    fmt = fmt or get_file_extension(str(path))
    if fmt == 'csv':
        return write_scan_csv(report, path)
    if fmt == 'json':
        return write_json(report, path)
    if fmt == 'obj':
        return write_obj(report, path)
    raise InvalidArgumentError(f"Unsupported format {fmt!r}")
