import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.optimize import brentq

from app.exceptions import DegenerateRayError, OnCurveError, ParabolicAmbiguityError
from app.services.sphere_math import as_unit_vec, tangent_basis
from app.services.support_field import SupportField, curvature_function
from utils import jets
from utils.jets import Jet2
from utils.pydantic_schema import IndexResult, Theorem1Counts

logger = logging.getLogger('projection_index')

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))
SEED_ANGLE = 0.5
MAX_ATTEMPTS = 8
PERTURBATION = 1e-7
NEWTON_ITERATIONS = 30
PARABOLIC_TOLERANCE = 1e-10


class PlanarHedgehog(ABC):
    """A 2pi-periodic planar support function with its first two derivatives.

    Orientation: p(theta) = (cos theta, sin theta), t(theta) = (-sin theta, cos theta).
    """

    @abstractmethod
    def derivatives(self, theta):
        """(h, h', h'') at an array of angles."""


@dataclass(frozen=True)
class PlanarConstant(PlanarHedgehog):
    r: float = 1.0

    def derivatives(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.full_like(theta, self.r), np.zeros_like(theta), np.zeros_like(theta)


@dataclass(frozen=True)
class CosineHarmonics(PlanarHedgehog):
    """Sum of a_k cos(k theta) + b_k sin(k theta) over terms (k, a_k, b_k)."""
    terms: Tuple[Tuple[int, float, float], ...] = ((2, 1.0, 0.0),)

    def derivatives(self, theta):
        theta = np.asarray(theta, dtype=float)
        h, dh, d2h = np.zeros_like(theta), np.zeros_like(theta), np.zeros_like(theta)
        for k, a, b in self.terms:
            c, s = np.cos(k * theta), np.sin(k * theta)
            h += a * c + b * s
            dh += k * (b * c - a * s)
            d2h -= k * k * (a * c + b * s)
        return h, dh, d2h


@dataclass(frozen=True)
class QuarticBoundary(PlanarHedgehog):
    """h(u, v) = uv (u^4 + v^4)^(-1/4) with (u, v) = p(theta)."""

    def derivatives(self, theta):
        t = Jet2(np.asarray(theta, dtype=float), 1.0, 0.0)
        u, v = jets.cos(t), jets.sin(t)
        h = u * v * jets.power(u ** 4 + v ** 4, -0.25)
        return np.asarray(h.val), np.asarray(h.dx), np.asarray(h.dxx)


@dataclass(frozen=True)
class CircleRestriction(PlanarHedgehog):
    """h restricted to the great circle normal to n, in the frame tangent_basis(n)."""
    field: SupportField
    n: Tuple[float, float, float]

    @property
    def frame(self):
        return tangent_basis(np.asarray(self.n, dtype=float))

    def derivatives(self, theta):
        e1, e2 = self.frame
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        h, dh, d2h = (np.empty_like(theta) for _ in range(3))
        for i, angle in enumerate(theta):
            c = np.cos(angle) * e1 + np.sin(angle) * e2
            t = -np.sin(angle) * e1 + np.cos(angle) * e2
            grad = self.field.gradient(c)
            h[i] = self.field.phi(c)
            dh[i] = grad @ t
            d2h[i] = t @ self.field.hessian(c) @ t - grad @ c
        return h, dh, d2h


def planar_point(ph, theta):
    """x_h(theta) = h'(theta) t(theta) + h(theta) p(theta); shape (..., 2)."""
    theta = np.asarray(theta, dtype=float)
    h, dh, _ = ph.derivatives(theta)
    c, s = np.cos(theta), np.sin(theta)
    point = np.stack([dh * -s + h * c, dh * c + h * s], axis=-1)
    return point.reshape(theta.shape + (2,))


def planar_radius(ph, theta):
    """Radius of curvature h'' + h."""
    theta = np.asarray(theta, dtype=float)
    h, _, d2h = ph.derivatives(theta)
    radius = np.asarray(h + d2h).reshape(theta.shape)
    return float(radius) if radius.ndim == 0 else radius


def _cross(d, vectors):
    return d[0] * vectors[..., 1] - d[1] * vectors[..., 0]


def _count_crossings(ph, x, d, thetas, curve, scale):
    """Signed crossings of the ray x + a d (a > 0). Returns (index, crossings, clean)."""
    s = _cross(d, curve - x)
    s_next = np.roll(s, -1)
    tol = 1e-9 * scale
    clean = True

    def s_at(theta):
        return float(_cross(d, planar_point(ph, theta) - x))

    index = crossings = 0
    step = thetas[1] - thetas[0]
    for i in np.nonzero(np.sign(s) != np.sign(s_next))[0]:
        lo, hi = thetas[i], thetas[i] + step
        if s[i] == 0.0:
            root = lo
        elif s_next[i] == 0.0:
            continue
        else:
            root = brentq(s_at, lo, hi, xtol=1e-12)
        along = float(np.dot(d, planar_point(ph, root) - x))
        if abs(along) <= tol:
            clean = False
            continue
        if along < 0.0:
            continue
        if abs(s_next[i] - s[i]) < 1e-10 * scale:
            clean = False
        crossings += 1
        index += int(np.sign(s_next[i] - s[i]))

    # near-miss: |s| has a tiny local minimum on the ray without a sign change
    along_grid = (curve - x) @ d
    local_min = (np.abs(s) <= np.abs(np.roll(s, 1))) & (np.abs(s) <= np.abs(s_next))
    if np.any(local_min & (np.abs(s) < tol) & (along_grid > tol) & (np.sign(s) == np.sign(s_next))):
        clean = False
    return index, crossings, clean


def ray_index(ph, x, n_samples=4096):
    """Signed number of crossings of the oriented curve with a ray from x.

    Directions follow golden-angle rotations of a fixed seed; a count is
    accepted when a slightly rotated ray agrees with it.
    """
    x = np.asarray(x, dtype=float)
    thetas = np.linspace(0.0, 2.0 * np.pi, int(n_samples), endpoint=False)
    curve = planar_point(ph, thetas)
    scale = max(1.0, float(np.max(np.abs(curve))))
    gap = float(np.min(np.linalg.norm(curve - x, axis=1)))
    if gap <= 1e-9 * scale:
        raise OnCurveError(f"Point {x.tolist()} lies on the hedgehog curve", distance=gap)

    fallback = None
    for attempt in range(1, MAX_ATTEMPTS + 1):
        angle = SEED_ANGLE + (attempt - 1) * GOLDEN_ANGLE
        d = np.array([np.cos(angle), np.sin(angle)])
        index, crossings, clean = _count_crossings(ph, x, d, thetas, curve, scale)
        if not clean:
            logger.debug(f"Ray {attempt} from {x.tolist()} is degenerate, rotating")
            continue
        d_check = np.array([np.cos(angle + 1e-3), np.sin(angle + 1e-3)])
        check, _, check_clean = _count_crossings(ph, x, d_check, thetas, curve, scale)
        result = IndexResult(x=tuple(x), direction=tuple(d), crossings=crossings, index=index,
                             degenerate=False, attempts=attempt)
        if check_clean and check == index:
            return result
        fallback = fallback or result.model_copy(update={'degenerate': True})

    if fallback is not None:
        logger.warning(f"Index at {x.tolist()} unstable under ray rotation")
        return fallback
    raise DegenerateRayError(f"All {MAX_ATTEMPTS} candidate rays from {x.tolist()} are degenerate")


def winding_number(ph, x, n_samples=4096):
    """Winding number of the hedgehog curve around x by angle accumulation."""
    x = np.asarray(x, dtype=float)
    thetas = np.linspace(0.0, 2.0 * np.pi, int(n_samples) + 1)
    rel = planar_point(ph, thetas) - x
    angles = np.unwrap(np.arctan2(rel[:, 1], rel[:, 0]))
    return int(np.rint((angles[-1] - angles[0]) / (2.0 * np.pi)))


def _solve_preimages(field, n, frame, x, grid):
    """Points p of the hemisphere with pi_n(x_h(p)) = x, by seeded Newton iteration."""
    e1, e2 = frame
    solutions = []
    gap = grid.spacing
    for p in grid.points:
        grad = field.gradient(p)
        residual = np.array([grad @ e1, grad @ e2]) - x
        hess_norm = np.linalg.norm(field.hessian(p))
        if np.linalg.norm(residual) > 2.0 * gap * max(hess_norm, 1e-12):
            continue

        q = p.copy()
        converged = False
        for _ in range(NEWTON_ITERATIONS):
            grad = field.gradient(q)
            residual = np.array([grad @ e1, grad @ e2]) - x
            if np.linalg.norm(residual) < 1e-12 * max(1.0, np.linalg.norm(grad)):
                converged = True
                break
            b1, b2 = tangent_basis(q)
            hess = field.hessian(q)
            jac = np.array([[e1 @ hess @ b1, e1 @ hess @ b2],
                            [e2 @ hess @ b1, e2 @ hess @ b2]])
            try:
                step = np.linalg.solve(jac, -residual)
            except np.linalg.LinAlgError:
                break
            q = q + step[0] * b1 + step[1] * b2
            q /= np.linalg.norm(q)
        if not converged or q @ n <= 0.0:
            continue
        if all(np.arccos(np.clip(q @ other, -1.0, 1.0)) > 1e-7 for other in solutions):
            solutions.append(q)
    return solutions


def _count(field, n, frame, x, grid):
    solutions = _solve_preimages(field, n, frame, x, grid)
    curvatures = [curvature_function(field, p) for p in solutions]
    for p, R in zip(solutions, curvatures):
        if abs(R) < PARABOLIC_TOLERANCE:
            raise ParabolicAmbiguityError(f"Preimage {p.tolist()} of {x.tolist()} has R_h = {R:.3e}",
                                          p=p.tolist(), curvature=R)
    return solutions, curvatures


def theorem1_counts(field, n, x, grid):
    """Elliptic and hyperbolic preimages of x under the projection of the hedgehog over the hemisphere of n.

    x is given in the coordinates of tangent_basis(n), the frame shared with
    restrict_to_circle. The result is flagged degenerate when perturbing x by
    1e-7 changes the counts.
    """
    n = as_unit_vec(n, normalize=True)
    x = np.asarray(x, dtype=float)
    frame = tangent_basis(n)
    solutions, curvatures = _count(field, n, frame, x, grid)
    nu_plus = sum(1 for R in curvatures if R > 0)
    nu_minus = len(curvatures) - nu_plus

    degenerate = False
    for shift in (np.array([PERTURBATION, 0.0]), np.array([0.0, PERTURBATION])):
        for sign in (1.0, -1.0):
            try:
                _, shifted = _count(field, n, frame, x + sign * shift, grid)
            except ParabolicAmbiguityError:
                degenerate = True
                continue
            if sum(1 for R in shifted if R > 0) != nu_plus or sum(1 for R in shifted if R < 0) != nu_minus:
                degenerate = True
    if degenerate:
        logger.warning(f"Counts at {x.tolist()} change under a {PERTURBATION:g} perturbation")

    return Theorem1Counts(nu_plus=nu_plus, nu_minus=nu_minus,
                          solutions=[tuple(float(v) for v in p) for p in solutions],
                          curvatures=[float(R) for R in curvatures], degenerate=degenerate)
