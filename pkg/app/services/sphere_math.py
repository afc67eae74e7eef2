import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.exceptions import InvalidArgumentError

logger = logging.getLogger('sphere_math')

UNIT_TOL = 1e-12

# (plane normal, half-space vector, half-space sign) of the four singular
# semicircles: (i) 3x+4z=0, y>=0  (ii) 3y-4z=0, x>=0
#              (iii) 3x-4z=0, y<=0 (iv) 3y+4z=0, x<=0
SEMICIRCLES = {
    'I': (np.array([3.0, 0.0, 4.0]) / 5.0, np.array([0.0, 1.0, 0.0])),
    'II': (np.array([0.0, 3.0, -4.0]) / 5.0, np.array([1.0, 0.0, 0.0])),
    'III': (np.array([3.0, 0.0, -4.0]) / 5.0, np.array([0.0, -1.0, 0.0])),
    'IV': (np.array([0.0, 3.0, 4.0]) / 5.0, np.array([-1.0, 0.0, 0.0])),
}


def as_unit_vec(p, normalize=False):
    """Validate (or normalize) a 3-vector as a point of the unit sphere."""
    v = np.asarray(p, dtype=float).reshape(-1)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise InvalidArgumentError(f"Expected a finite 3-vector, got {p!r}")
    norm = np.linalg.norm(v)
    if normalize:
        if norm == 0.0:
            raise InvalidArgumentError("Cannot normalize the zero vector")
        return v / norm
    if abs(norm - 1.0) > UNIT_TOL:
        raise InvalidArgumentError(f"Vector {p!r} is not unit length (norm {norm:.3e})")
    return v


@dataclass(frozen=True)
class SphericalGrid:
    """Latitude-longitude sample of S^2, optionally restricted to a hemisphere.

    ``theta`` and ``phi`` are the colatitude/longitude of every point measured
    in ``frame`` (rows e1, e2, pole); ``points`` holds the Cartesian points.
    """
    n_theta: int
    n_phi: int
    points: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    frame: np.ndarray
    hemisphere: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.points)

    @property
    def spacing(self):
        return max(np.pi / self.n_theta, 2.0 * np.pi / self.n_phi)


def sph_grid(n_theta, n_phi, hemisphere=None):
    """Lattice avoiding the poles; the pole axis is the hemisphere direction if given."""
    if int(n_theta) < 2 or int(n_phi) < 3:
        raise InvalidArgumentError(f"sph_grid needs n_theta >= 2 and n_phi >= 3, got ({n_theta}, {n_phi})")
    n_theta, n_phi = int(n_theta), int(n_phi)

    if hemisphere is None:
        frame = np.eye(3)
        n = None
    else:
        n = as_unit_vec(hemisphere, normalize=True)
        e1, e2 = tangent_basis(n)
        frame = np.vstack([e1, e2, n])

    theta = (np.arange(n_theta) + 0.5) * np.pi / n_theta
    phi = np.arange(n_phi) * 2.0 * np.pi / n_phi
    tt, pp = np.meshgrid(theta, phi, indexing='ij')
    local = np.stack([np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=-1).reshape(-1, 3)
    points = local @ frame
    tt, pp = tt.reshape(-1), pp.reshape(-1)

    if n is not None:
        keep = points @ n >= -UNIT_TOL
        points, tt, pp = points[keep], tt[keep], pp[keep]

    logger.debug(f"Built spherical grid {n_theta}x{n_phi} with {len(points)} points")
    return SphericalGrid(n_theta=n_theta, n_phi=n_phi, points=points, theta=tt, phi=pp,
                         frame=frame, hemisphere=n)


def tangent_basis(p):
    """Right-handed orthonormal (e1, e2) with e1 x e2 = p.

    The seed is the coordinate axis least aligned with p, followed by one
    Gram-Schmidt step, so the result is deterministic and branch-stable.
    """
    p = np.asarray(p, dtype=float)
    seed = np.zeros(3)
    seed[int(np.argmin(np.abs(p)))] = 1.0
    e1 = seed - np.dot(seed, p) * p
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(p, e1)
    e2 /= np.linalg.norm(e2)
    return e1, e2


def _angle(a, b):
    return float(np.arctan2(np.linalg.norm(np.cross(a, b)), np.dot(a, b)))


def semicircle_distance(p, which):
    """Geodesic distance from p to one of the four closed singular semicircles."""
    if which not in SEMICIRCLES:
        raise InvalidArgumentError(f"Unknown semicircle {which!r}; expected one of {sorted(SEMICIRCLES)}")
    p = np.asarray(p, dtype=float)
    normal, half = SEMICIRCLES[which]
    # The semicircle's endpoints lie on the line normal x half
    endpoint = np.cross(normal, half)
    endpoint /= np.linalg.norm(endpoint)

    in_plane = p - np.dot(p, normal) * normal
    norm = np.linalg.norm(in_plane)
    if norm > 1e-15:
        foot = in_plane / norm
        if np.dot(foot, half) >= 0.0:
            return _angle(p, foot)
    # Closest point is one of the endpoints
    return min(_angle(p, endpoint), _angle(p, -endpoint))


def singular_set_distance(p):
    """Distance from p to the union of the four semicircles."""
    return min(semicircle_distance(p, which) for which in SEMICIRCLES)
