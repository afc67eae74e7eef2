import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from app.exceptions import EulerViolationError, InvalidArgumentError
from app.services.sphere_math import as_unit_vec, tangent_basis
from utils.pydantic_schema import HedgehogJet

logger = logging.getLogger('support_field')

EULER_TOLERANCE = 1e-6
FD_STEP = 1e-5
# second differences of values lose two orders of step; a larger step balances rounding
FD_VALUE_HESSIAN_STEP = 1e-4


class SupportField(ABC):
    """A support function h on S^2 through its 1-homogeneous extension phi.

    Subclasses provide phi, its gradient and its Hessian at any u != 0.
    """

    @abstractmethod
    def phi(self, u):
        ...

    @abstractmethod
    def gradient(self, u):
        ...

    @abstractmethod
    def hessian(self, u):
        ...

    def __add__(self, other):
        if isinstance(other, SupportField):
            return SumOfFields((self, other))
        return NotImplemented


@dataclass(frozen=True)
class Constant(SupportField):
    """h = r, the sphere of radius r (a point when r = 0)."""
    r: float

    def phi(self, u):
        return self.r * np.linalg.norm(u)

    def gradient(self, u):
        u = np.asarray(u, dtype=float)
        return self.r * u / np.linalg.norm(u)

    def hessian(self, u):
        u = np.asarray(u, dtype=float)
        norm = np.linalg.norm(u)
        p = u / norm
        return (self.r / norm) * (np.eye(3) - np.outer(p, p))


@dataclass(frozen=True)
class Linear(SupportField):
    """h(p) = <c, p>, a hedgehog reduced to the single point c."""
    c: Tuple[float, float, float]

    def phi(self, u):
        return float(np.dot(self.c, u))

    def gradient(self, u):
        return np.array(self.c, dtype=float)

    def hessian(self, u):
        return np.zeros((3, 3))


@dataclass(frozen=True)
class SphereOffset(SupportField):
    """h + const: Minkowski sum with a ball of (signed) radius const."""
    base: SupportField
    const: float

    def phi(self, u):
        return self.base.phi(u) + self.const * np.linalg.norm(u)

    def gradient(self, u):
        u = np.asarray(u, dtype=float)
        return self.base.gradient(u) + self.const * u / np.linalg.norm(u)

    def hessian(self, u):
        u = np.asarray(u, dtype=float)
        norm = np.linalg.norm(u)
        p = u / norm
        return self.base.hessian(u) + (self.const / norm) * (np.eye(3) - np.outer(p, p))


@dataclass(frozen=True)
class SumOfFields(SupportField):
    fields: Tuple[SupportField, ...]

    def phi(self, u):
        return sum(f.phi(u) for f in self.fields)

    def gradient(self, u):
        return sum((f.gradient(u) for f in self.fields), np.zeros(3))

    def hessian(self, u):
        return sum((f.hessian(u) for f in self.fields), np.zeros((3, 3)))


def _power_derivs(x, k):
    """x**k and its first two derivatives, exact zeros for small k."""
    value = x ** k if k > 0 else 1.0
    first = k * x ** (k - 1) if k >= 1 else 0.0
    second = k * (k - 1) * x ** (k - 2) if k >= 2 else 0.0
    return value, first, second


def _monomial(u, alpha):
    """Value, gradient and Hessian of u0^a u1^b u2^c."""
    parts = [_power_derivs(u[i], alpha[i]) for i in range(3)]
    values = [part[0] for part in parts]
    value = values[0] * values[1] * values[2]
    grad = np.empty(3)
    hess = np.empty((3, 3))
    for i in range(3):
        others = [values[j] for j in range(3) if j != i]
        grad[i] = parts[i][1] * others[0] * others[1]
        hess[i, i] = parts[i][2] * others[0] * others[1]
    for i, j in ((0, 1), (0, 2), (1, 2)):
        k = 3 - i - j
        hess[i, j] = hess[j, i] = parts[i][1] * parts[j][1] * values[k]
    return value, grad, hess


@dataclass(frozen=True)
class TrigPolynomial(SupportField):
    """h(p) = sum of c_alpha p^alpha restricted to the sphere.

    Monomials in the Cartesian coordinates of p are trigonometric polynomials
    in spherical coordinates. The extension is c_alpha u^alpha ||u||^(1-|alpha|).
    """
    coefficients: Dict[Tuple[int, int, int], float] = dataclass_field(default_factory=dict)

    def __post_init__(self):
        for alpha in self.coefficients:
            if len(alpha) != 3 or any(int(a) != a or a < 0 for a in alpha):
                raise InvalidArgumentError(f"Invalid monomial exponent {alpha!r}")

    def __hash__(self):
        return hash(tuple(sorted(self.coefficients.items())))

    def _terms(self, u):
        u = np.asarray(u, dtype=float)
        norm = np.linalg.norm(u)
        for alpha, coef in self.coefficients.items():
            degree = sum(alpha)
            m, dm, hm = _monomial(u, alpha)
            # s = ||u||^(1-d) and its derivatives
            s = norm ** (1 - degree)
            ds = (1 - degree) * norm ** (-1 - degree) * u
            hs = (1 - degree) * (norm ** (-1 - degree) * np.eye(3)
                                 - (1 + degree) * norm ** (-3 - degree) * np.outer(u, u))
            yield coef, m, dm, hm, s, ds, hs

    def phi(self, u):
        return sum(coef * m * s for coef, m, _, _, s, _, _ in self._terms(u))

    def gradient(self, u):
        grad = np.zeros(3)
        for coef, m, dm, _, s, ds, _ in self._terms(u):
            grad += coef * (dm * s + m * ds)
        return grad

    def hessian(self, u):
        hess = np.zeros((3, 3))
        for coef, m, dm, hm, s, ds, hs in self._terms(u):
            hess += coef * (hm * s + np.outer(dm, ds) + np.outer(ds, dm) + m * hs)
        return hess


@dataclass(frozen=True)
class Custom(SupportField):
    """A user supplied phi; missing derivatives fall back to central differences.

    Finite differences use the step 1e-5 * max(1, ||u||), so such fields carry
    roughly six significant digits in their Hessian.
    """
    phi_fn: Callable
    gradient_fn: Optional[Callable] = None
    hessian_fn: Optional[Callable] = None
    name: str = "custom"

    def phi(self, u):
        return float(self.phi_fn(np.asarray(u, dtype=float)))

    def gradient(self, u):
        u = np.asarray(u, dtype=float)
        if self.gradient_fn is not None:
            return np.asarray(self.gradient_fn(u), dtype=float)
        step = FD_STEP * max(1.0, np.linalg.norm(u))
        grad = np.empty(3)
        for i in range(3):
            e = np.zeros(3)
            e[i] = step
            grad[i] = (self.phi(u + e) - self.phi(u - e)) / (2.0 * step)
        return grad

    def hessian(self, u):
        u = np.asarray(u, dtype=float)
        if self.hessian_fn is not None:
            return np.asarray(self.hessian_fn(u), dtype=float)
        hess = np.empty((3, 3))
        if self.gradient_fn is not None:
            step = FD_STEP * max(1.0, np.linalg.norm(u))
            for i in range(3):
                e = np.zeros(3)
                e[i] = step
                hess[:, i] = (self.gradient(u + e) - self.gradient(u - e)) / (2.0 * step)
            return 0.5 * (hess + hess.T)
        step = FD_VALUE_HESSIAN_STEP * max(1.0, np.linalg.norm(u))
        eye = np.eye(3) * step
        f0 = self.phi(u)
        for i in range(3):
            hess[i, i] = (self.phi(u + eye[i]) - 2.0 * f0 + self.phi(u - eye[i])) / step ** 2
            for j in range(i + 1, 3):
                hess[i, j] = hess[j, i] = (
                    self.phi(u + eye[i] + eye[j]) - self.phi(u + eye[i] - eye[j])
                    - self.phi(u - eye[i] + eye[j]) + self.phi(u - eye[i] - eye[j])
                ) / (4.0 * step ** 2)
        return hess


def symmetric_eigenvalues(matrix):
    """Eigenvalues of a symmetric 3x3 matrix, ascending.

    Closed-form trigonometric solution of the characteristic polynomial,
    each root then polished by one Newton step.
    """
    a = 0.5 * (np.asarray(matrix, dtype=float) + np.asarray(matrix, dtype=float).T)
    off = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
    trace = np.trace(a)
    if off == 0.0:
        return np.sort(np.diag(a).copy())

    q = trace / 3.0
    p2 = (a[0, 0] - q) ** 2 + (a[1, 1] - q) ** 2 + (a[2, 2] - q) ** 2 + 2.0 * off
    p = np.sqrt(p2 / 6.0)
    b = (a - q * np.eye(3)) / p
    r = np.clip(np.linalg.det(b) / 2.0, -1.0, 1.0)
    angle = np.arccos(r) / 3.0
    largest = q + 2.0 * p * np.cos(angle)
    smallest = q + 2.0 * p * np.cos(angle + 2.0 * np.pi / 3.0)
    eigs = np.array([smallest, trace - largest - smallest, largest])

    minors = (a[0, 0] * a[1, 1] - a[0, 1] ** 2 + a[0, 0] * a[2, 2] - a[0, 2] ** 2
              + a[1, 1] * a[2, 2] - a[1, 2] ** 2)
    det = np.linalg.det(a)

    def charpoly(lam):
        return -lam ** 3 + trace * lam ** 2 - minors * lam + det

    for i, lam in enumerate(eigs):
        slope = -3.0 * lam ** 2 + 2.0 * trace * lam - minors
        if slope == 0.0 or not np.isfinite(slope):
            continue
        polished = lam - charpoly(lam) / slope
        if abs(charpoly(polished)) <= abs(charpoly(lam)):
            eigs[i] = polished
    return np.sort(eigs)


def eval_support(field, p):
    """h(p) = phi(p)"""
    return float(field.phi(as_unit_vec(p)))


def hedgehog_point(field, p):
    """x_h(p) = grad phi(p), the tangential gradient of h plus h(p) p."""
    return np.asarray(field.gradient(as_unit_vec(p)), dtype=float)


def hedgehog_jet(field, p):
    """Hedgehog point with principal radii from the eigenvalues of Hess phi(p)."""
    p = as_unit_vec(p)
    x = hedgehog_point(field, p)
    eigs = symmetric_eigenvalues(field.hessian(p))

    zero_idx = int(np.argmin(np.abs(eigs)))
    radial = eigs[zero_idx]
    r1, r2 = sorted(float(v) for v in np.delete(eigs, zero_idx))
    if abs(radial) > EULER_TOLERANCE * max(1.0, abs(r1), abs(r2)):
        logger.error(f"Euler relation violated at p={p}: eigenvalues {eigs}")
        raise EulerViolationError(
            f"Hess phi(p) has no eigenvalue near zero (smallest |lambda| = {abs(radial):.3e})",
            p=p.tolist(), eigenvalues=eigs.tolist())

    return HedgehogJet(p=tuple(p), x=tuple(x), r1=r1, r2=r2, R_h=r1 * r2, mean_radius=0.5 * (r1 + r2))


def curvature_function(field, p):
    """R_h(p): determinant of Hess phi(p) restricted to the tangent plane."""
    p = as_unit_vec(p)
    e1, e2 = tangent_basis(p)
    hess = field.hessian(p)
    m11 = e1 @ hess @ e1
    m12 = e1 @ hess @ e2
    m22 = e2 @ hess @ e2
    return float(m11 * m22 - m12 * m12)


def add_ball(field, R):
    """Support function h + R; radii shift by exactly R."""
    R = float(R)
    if isinstance(field, Constant):
        return Constant(field.r + R)
    if isinstance(field, SphereOffset):
        return SphereOffset(field.base, field.const + R)
    return SphereOffset(field, R)


def restrict_to_circle(field, n):
    """Planar hedgehog h_n(theta) = h(cos(theta) e1 + sin(theta) e2) on the great circle normal to n."""
    from app.services.projection_index import CircleRestriction

    return CircleRestriction(field, tuple(as_unit_vec(n, normalize=True)))


def extreme_points(field, n, grid):
    """Grid points whose hedgehog point is extremal in direction n.

    Returns (p, <x_h(p), n>) for every point within 1e-9 * scale of the maximum.
    """
    if len(grid) == 0:
        raise InvalidArgumentError("extreme_points needs a non-empty grid")
    n = as_unit_vec(n, normalize=True)
    values = np.array([np.dot(field.gradient(p), n) for p in grid.points])
    scale = max(1.0, float(np.max(np.abs(values))))
    best = float(np.max(values))
    keep = np.nonzero(values >= best - 1e-9 * scale)[0]
    logger.debug(f"extreme_points: {len(keep)} of {len(values)} grid points within tolerance of {best:.6g}")
    return [(grid.points[i], float(values[i])) for i in keep]
