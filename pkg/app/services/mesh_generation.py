import logging

import numpy as np

from app.exceptions import InvalidArgumentError
from app.services.graph_surface import base_g, crosscap_point, mm_f
from utils.pydantic_schema import MeshData

logger = logging.getLogger('mesh_generation')


def domain_boundary_radius(alpha):
    """Radius of the boundary of D in direction alpha."""
    return (np.abs(np.cos(alpha)) ** 0.8 + np.abs(np.sin(alpha)) ** 0.8) ** -1.25


def _polar_points(n):
    """Center plus n rings of n points each, the outer ring on the boundary of D."""
    rho = np.arange(1, n + 1) / n
    alpha = np.arange(n) * 2.0 * np.pi / n
    rr, aa = np.meshgrid(rho, alpha, indexing='ij')
    radius = rr * domain_boundary_radius(aa)
    x = np.concatenate([[0.0], (radius * np.cos(aa)).ravel()])
    y = np.concatenate([[0.0], (radius * np.sin(aa)).ravel()])
    # snap the boundary points of D exactly
    x = np.clip(x, -1.0, 1.0)
    y = np.clip(y, -1.0, 1.0)
    return x, y


def _polar_faces(n, offset=0, flip=False):
    """Triangles of the polar grid, counterclockwise seen from +z unless flipped."""
    def vid(ring, k):
        return offset + 1 + ring * n + (k % n)

    faces = []
    for k in range(n):
        faces.append((offset, vid(0, k), vid(0, k + 1)))
    for ring in range(n - 1):
        for k in range(n):
            a, b = vid(ring, k), vid(ring, k + 1)
            c, d = vid(ring + 1, k), vid(ring + 1, k + 1)
            faces.append((a, c, d))
            faces.append((a, d, b))
    faces = np.array(faces, dtype=np.int64)
    return faces[:, ::-1] if flip else faces


def vertex_normals(vertices, faces, fallback=(0.0, 0.0, 1.0)):
    """Area-weighted vertex normals; vertices without usable faces get the fallback."""
    v0, v1, v2 = (vertices[faces[:, i]] for i in range(3))
    face_normals = np.cross(v1 - v0, v2 - v0)
    normals = np.zeros_like(vertices)
    for i in range(3):
        np.add.at(normals, faces[:, i], face_normals)
    length = np.linalg.norm(normals, axis=1)
    bad = ~(length > 1e-300)
    normals[bad] = fallback
    length[bad] = 1.0
    return normals / length[:, None]


def _heights(x, y, t, eps):
    return base_g(x, y) + float(t) * eps * mm_f(x, y)


def mm_mesh(t, n):
    """Both sheets of the glued surface; the upper sheet faces +z, the lower one -z."""
    if int(n) < 3:
        raise InvalidArgumentError(f"Mesh resolution must be at least 3, got {n}")
    n = int(n)
    x, y = _polar_points(n)
    count = len(x)
    upper = np.column_stack([x, y, _heights(x, y, t, 1)])
    lower = np.column_stack([x, y, _heights(x, y, t, -1)])
    vertices = np.vstack([upper, lower])
    faces = np.vstack([_polar_faces(n), _polar_faces(n, offset=count, flip=True)])

    normals = np.vstack([
        vertex_normals(upper, _polar_faces(n), fallback=(0.0, 0.0, 1.0)),
        vertex_normals(lower, _polar_faces(n, flip=True), fallback=(0.0, 0.0, -1.0)),
    ])
    logger.info(f"Built mm mesh t={float(t):.6g}: {len(vertices)} vertices, {len(faces)} faces")
    return MeshData(vertices=vertices, faces=faces, normals=normals)


def basegraph_mesh(n):
    """Graph of g over D."""
    if int(n) < 3:
        raise InvalidArgumentError(f"Mesh resolution must be at least 3, got {n}")
    n = int(n)
    x, y = _polar_points(n)
    vertices = np.column_stack([x, y, base_g(x, y)])
    faces = _polar_faces(n)
    logger.info(f"Built basegraph mesh: {len(vertices)} vertices, {len(faces)} faces")
    return MeshData(vertices=vertices, faces=faces, normals=vertex_normals(vertices, faces))


def crosscap_mesh(n):
    """The parametrization r^4 (u, 1, uv) sampled on [-1, 1]^2."""
    if int(n) < 2:
        raise InvalidArgumentError(f"Mesh resolution must be at least 2, got {n}")
    n = int(n)
    grid = np.linspace(-1.0, 1.0, n)
    uu, vv = np.meshgrid(grid, grid, indexing='ij')
    vertices = crosscap_point(uu.ravel(), vv.ravel()).T

    faces = []
    for i in range(n - 1):
        for j in range(n - 1):
            a, b = i * n + j, i * n + j + 1
            c, d = (i + 1) * n + j, (i + 1) * n + j + 1
            faces.append((a, c, d))
            faces.append((a, d, b))
    faces = np.array(faces, dtype=np.int64)
    logger.info(f"Built crosscap mesh: {len(vertices)} vertices, {len(faces)} faces")
    return MeshData(vertices=vertices, faces=faces, normals=vertex_normals(vertices, faces, fallback=(0.0, 1.0, 0.0)))


def build_mesh(surface, t, n):
    if surface == 'mm':
        return mm_mesh(t, n)
    if surface == 'basegraph':
        return basegraph_mesh(n)
    if surface == 'crosscap':
        return crosscap_mesh(n)
    raise InvalidArgumentError(f"Unknown mesh surface {surface!r}")
