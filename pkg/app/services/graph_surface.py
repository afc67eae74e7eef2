import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from app.exceptions import (
    DomainViolationError, InvalidArgumentError, NearSingularError, NegativeRadicandError,
)
from app.services.sphere_math import singular_set_distance
from utils import jets
from utils.jets import Jet2
from utils.pydantic_schema import (
    AlexandrovCheck, CurvatureSample, DecaySample, SingularSample, SingularSetReport,
)

logger = logging.getLogger('graph_surface')

RADICAND_CLAMP = 1e-12
DOMAIN_TOLERANCE = 1e-12
NEAR_SINGULAR_SLOPE = 1e6
OVERFLOW_SLOPE = 1e12

CUSPS = ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0))

# limiting normals at the cusps, per (cusp, sheet)
CUSP_NORMALS = {
    ((1.0, 0.0), 1): (-0.8, 0.0, 0.6),
    ((1.0, 0.0), -1): (0.8, 0.0, -0.6),
    ((-1.0, 0.0), 1): (0.8, 0.0, 0.6),
    ((-1.0, 0.0), -1): (-0.8, 0.0, -0.6),
    ((0.0, 1.0), 1): (0.0, 0.8, 0.6),
    ((0.0, 1.0), -1): (0.0, -0.8, -0.6),
    ((0.0, -1.0), 1): (0.0, -0.8, 0.6),
    ((0.0, -1.0), -1): (0.0, 0.8, -0.6),
}

SINGULAR_PATH_DELTAS = tuple(1e-2 * 16.0 ** -j for j in range(5))


# --- Expression trees (floats, numpy arrays, Jet2 or Interval) ---

def radicand_expr(x, y):
    """(1 - x^4 - y^4)^(5/2) - 25 x^2 y^2 sqrt(Q)"""
    x4, y4 = x ** 4, y ** 4
    b = 1.0 - x4 - y4
    q = x ** 8 + y ** 8 + 3.0 * (x4 + y4 - x4 * y4) + 1.0
    return jets.power(b, 2.5) - 25.0 * (x ** 2 * y ** 2) * jets.sqrt(q)


def mm_f_expr(x, y):
    return x * y * jets.sqrt(radicand_expr(x, y)) / (1.0 - x ** 4 - y ** 4)


def base_g_expr(x, y):
    return (x ** 2 - y ** 2) - (x ** 4 - y ** 4) / 6.0


def curvature_numerator_expr(x, y, tau):
    """16 A^2 (u_xx u_yy - u_xy^2) for u = g + tau f, with A the radicand.

    Writing f = P sqrt(A) with P = xy/b gives 4 A^(3/2) Hess u = A M - tau P grad A grad A^T,
    so the determinant lemma leaves a form without the 1/sqrt(A) poles of Hess f.
    The points may be floats, arrays, intervals or jets; tau multiplies from the right.
    """
    jx, jy = Jet2.variables(x, y)
    A = radicand_expr(jx, jy)
    P = jx * jy / (1.0 - jx ** 4 - jy ** 4)
    g = base_g_expr(jx, jy)
    a, s = A.val, jets.sqrt(A.val)
    a1, a2 = A.dx, A.dy
    m11 = 4.0 * s * g.dxx + (4.0 * a * P.dxx + 4.0 * (P.dx * a1) + 2.0 * P.val * A.dxx) * tau
    m12 = 4.0 * s * g.dxy + (4.0 * a * P.dxy + 2.0 * (P.dx * a2 + P.dy * a1) + 2.0 * P.val * A.dxy) * tau
    m22 = 4.0 * s * g.dyy + (4.0 * a * P.dyy + 4.0 * (P.dy * a2) + 2.0 * P.val * A.dyy) * tau
    rank_one = m22 * a1 ** 2 - 2.0 * m12 * (a1 * a2) + m11 * a2 ** 2
    return a * (m11 * m22 - m12 ** 2) - (P.val * rank_one) * tau


def domain_expr(x, y):
    """1 - |x|^(4/5) - |y|^(4/5); nonnegative exactly on D."""
    return 1.0 - jets.power(abs(x), 0.8) - jets.power(abs(y), 0.8)


def boundary_distance(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return 1.0 - np.abs(x) ** 0.8 - np.abs(y) ** 0.8


def _check_domain(x, y):
    if np.any(boundary_distance(x, y) < -DOMAIN_TOLERANCE):
        raise DomainViolationError(f"Point(s) outside |x|^(4/5)+|y|^(4/5) <= 1: ({x}, {y})")


def _scalar(value, like):
    return float(value) if np.ndim(like) == 0 else value


# --- Height functions ---

def mm_radicand(x, y, clamp=True):
    """Radicand of f. Values in [-1e-12, 0) are rounding noise and clamp to zero."""
    _check_domain(x, y)
    xa, ya = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    with np.errstate(invalid='ignore'):
        value = radicand_expr(xa, ya)
    if clamp:
        value = np.where((value < 0.0) & (value >= -RADICAND_CLAMP), 0.0, value)
    return _scalar(value, x)


def mm_f(x, y):
    """f = xy sqrt(radicand) / (1 - x^4 - y^4), with f = 0 at the four cusps."""
    xa, ya = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    radicand = np.asarray(mm_radicand(xa, ya))
    if np.any(radicand < 0.0):
        worst = float(np.min(radicand))
        logger.error(f"Negative radicand {worst:.3e} at ({x}, {y})")
        raise NegativeRadicandError(f"Radicand {worst:.3e} is below -{RADICAND_CLAMP:g}", value=worst)
    denominator = 1.0 - xa ** 4 - ya ** 4
    cusp = denominator <= 0.0
    with np.errstate(divide='ignore', invalid='ignore'):
        value = np.where(cusp, 0.0, xa * ya * np.sqrt(radicand) / np.where(cusp, 1.0, denominator))
    return _scalar(value, x)


def base_g(x, y):
    xa, ya = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return _scalar(base_g_expr(xa, ya), x)


def surface_height(t, eps, x, y):
    """Height of the sheet eps of the surface: g + t eps f."""
    if eps not in (1, -1):
        raise InvalidArgumentError(f"eps must be +1 or -1, got {eps!r}")
    return base_g(x, y) + float(t) * eps * mm_f(x, y)


# --- Surfaces as graphs ---

@dataclass(frozen=True)
class GraphSurfaceSpec:
    """A graph z = u(x, y) with a domain rule and a sheet orientation.

    ``kind`` is one of 'mm', 'crosscap', 'basegraph', 'custom'. Custom heights
    are callables on (X, Y) built from operators shared by numpy and ``Jet2``;
    their domain callable returns a value that is nonnegative inside.
    """
    kind: str
    t: float = 0.0
    eps: int = 1
    height_fn: Optional[Callable] = None
    domain_fn: Optional[Callable] = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in ('mm', 'crosscap', 'basegraph', 'custom'):
            raise InvalidArgumentError(f"Unknown surface kind {self.kind!r}")
        if self.eps not in (1, -1):
            raise InvalidArgumentError(f"eps must be +1 or -1, got {self.eps!r}")
        if self.kind == 'custom' and (self.height_fn is None or self.domain_fn is None):
            raise InvalidArgumentError("Custom surfaces need a height and a domain callable")

    @classmethod
    def mm(cls, t, eps=1):
        t = float(Fraction(t)) if isinstance(t, (str, Fraction)) else float(t)
        if t < 0:
            raise InvalidArgumentError(f"t must be nonnegative, got {t}")
        return cls(kind='mm', t=t, eps=eps, name=f"mm(t={t:g}, eps={eps:+d})")

    @classmethod
    def base(cls, eps=1):
        return cls(kind='basegraph', eps=eps, name="basegraph")

    @classmethod
    def crosscap(cls, eps=1):
        return cls(kind='crosscap', eps=eps, name="crosscap")

    @classmethod
    def custom(cls, height_fn, domain_fn, name="custom", eps=1):
        return cls(kind='custom', eps=eps, height_fn=height_fn, domain_fn=domain_fn, name=name)

    def with_sheet(self, eps):
        return GraphSurfaceSpec(kind=self.kind, t=self.t, eps=eps, height_fn=self.height_fn,
                                domain_fn=self.domain_fn, name=self.name)

    def height(self, x, y):
        """Height expression on plain values or jets."""
        if self.kind == 'basegraph':
            return base_g_expr(x, y)
        if self.kind == 'mm':
            g = base_g_expr(x, y)
            if self.t == 0.0:
                return g
            return g + mm_f_expr(x, y) * (self.t * self.eps)
        if self.kind == 'crosscap':
            return self.eps * (x / y) * jets.sqrt(jets.power(y, 2.5) - x ** 2)
        return self.height_fn(x, y)

    def domain(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind in ('mm', 'basegraph'):
            return boundary_distance(x, y)
        if self.kind == 'crosscap':
            with np.errstate(invalid='ignore'):
                return np.where(y > 0.0, np.abs(y) ** 2.5 - x ** 2, -np.inf)
        return np.asarray(self.domain_fn(x, y), dtype=float)


def height_jet(spec, x, y):
    """Second-order jet of the height at arrays (x, y)."""
    X, Y = Jet2.variables(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        return spec.height(X, Y)


def curvature_arrays(spec, x, y):
    """Vectorised curvature data of the oriented graph at arrays (x, y).

    The eps=+1 sheet carries the normal (-u_x, -u_y, 1)/W, the eps=-1 sheet
    its negative, and principal curvatures follow that normal.
    """
    jet = height_jet(spec, x, y)
    z = np.asarray(jet.val, dtype=float)
    ux, uy = np.asarray(jet.dx, dtype=float), np.asarray(jet.dy, dtype=float)
    uxx, uxy, uyy = (np.asarray(v, dtype=float) for v in jet.hessian)
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        w2 = 1.0 + ux ** 2 + uy ** 2
        w = np.sqrt(w2)
        k_num = uxx * uyy - uxy ** 2
        K = k_num / w2 ** 2
        H = ((1.0 + uy ** 2) * uxx - 2.0 * ux * uy * uxy + (1.0 + ux ** 2) * uyy) / (2.0 * w2 * w)
        root = np.sqrt(np.maximum(H ** 2 - K, 0.0))
        kappa_a = spec.eps * (H - root)
        kappa_b = spec.eps * (H + root)
        ra, rb = 1.0 / kappa_a, 1.0 / kappa_b
        normal = spec.eps * np.stack([-ux / w, -uy / w, 1.0 / w], axis=-1)
    return {
        'z': z, 'ux': ux, 'uy': uy, 'uxx': uxx, 'uxy': uxy, 'uyy': uyy,
        'K_numerator': k_num, 'K': K, 'H': spec.eps * H,
        'r1': np.minimum(ra, rb), 'r2': np.maximum(ra, rb),
        'normal': normal, 'slope': w,
    }


def graph_curvature(spec, x, y):
    """Curvature sample at a strictly interior point."""
    distance = float(spec.domain(x, y))
    if distance <= 0.0:
        raise DomainViolationError(f"({x}, {y}) is not strictly inside the domain of {spec.name}",
                                   boundary_distance=distance)
    data = curvature_arrays(spec, float(x), float(y))
    slope = float(data['slope'])
    near_singular = not np.isfinite(slope) or slope > NEAR_SINGULAR_SLOPE
    if near_singular:
        logger.warning(f"Near-singular slope {slope:.3e} at ({x}, {y}) on {spec.name}")
    return CurvatureSample(
        x=float(x), y=float(y), sheet=spec.eps, z=float(data['z']),
        K_numerator=float(data['K_numerator']), K=float(data['K']),
        r1=float(data['r1']), r2=float(data['r2']),
        normal=tuple(float(v) for v in data['normal']),
        boundary_distance=distance, near_singular=near_singular,
    )


def _is_cusp(spec, x, y):
    return spec.kind in ('mm', 'basegraph') and 1.0 - x ** 4 - y ** 4 <= 0.0


def gauss_map(spec, x, y):
    """Unit normal of the oriented sheet; at the cusps f and its gradient vanish."""
    x, y = float(x), float(y)
    if spec.domain(x, y) < -DOMAIN_TOLERANCE:
        raise DomainViolationError(f"({x}, {y}) is outside the domain of {spec.name}")
    if _is_cusp(spec, x, y):
        ux, uy = x * (2.0 - 2.0 * x * x / 3.0), -y * (2.0 - 2.0 * y * y / 3.0)
    else:
        jet = height_jet(spec, x, y)
        ux, uy = float(jet.dx), float(jet.dy)
    if not (np.isfinite(ux) and np.isfinite(uy)) or max(abs(ux), abs(uy)) > OVERFLOW_SLOPE:
        raise NearSingularError(f"Gradient overflow at ({x}, {y}) on {spec.name}", gradient=(ux, uy))
    w = np.sqrt(1.0 + ux * ux + uy * uy)
    return spec.eps * np.array([-ux / w, -uy / w, 1.0 / w])


# --- Cross-cap ---

def crosscap_point(u, v):
    """r^4 (u, 1, uv) with r^2 = u^2 + v^2."""
    r4 = (u * u + v * v) ** 2
    return np.array([r4 * u, r4, r4 * u * v], dtype=float)


def crosscap_residual(u, v, variant='x4y5'):
    """Relative residual of the implicit quartic-type equation at crosscap_point(u, v)."""
    if variant not in ('x4y5', 'x5y5'):
        raise InvalidArgumentError(f"Unknown variant {variant!r}; expected 'x4y5' or 'x5y5'")
    x, y, z = crosscap_point(u, v)
    reference = x ** 4 * y ** 5
    lhs = reference if variant == 'x4y5' else x ** 5 * y ** 5
    rhs = (x ** 4 + y ** 2 * z ** 2) ** 2
    return float((lhs - rhs) / max(1.0, abs(reference)))


def crosscap_graph_f(x, y):
    """(x/y) sqrt(y^(5/2) - x^2) on y > 0, x^2 <= y^(5/2)."""
    x, y = float(x), float(y)
    if y <= 0.0:
        raise DomainViolationError(f"crosscap graph needs y > 0, got y={y}")
    radicand = y ** 2.5 - x * x
    if radicand < -DOMAIN_TOLERANCE * max(1.0, y ** 2.5):
        raise DomainViolationError(f"({x}, {y}) violates x^2 <= y^(5/2)")
    return (x / y) * np.sqrt(max(radicand, 0.0))


# --- Singular set and radii near it ---

def _cusp_frame(cusp):
    axis = np.array(cusp, dtype=float)
    return axis, np.array([-axis[1], axis[0]])


def _path_point(cusp, delta, lam):
    """Point at axial distance delta from a cusp, at fraction lam of the local half-width."""
    axis, across = _cusp_frame(cusp)
    s = 1.0 - delta
    half_width = (1.0 - s ** 0.8) ** 1.25
    return s * axis + lam * half_width * across


def _neville_at_zero(nodes, values):
    """Value at 0 of the interpolating polynomial through (nodes, values)."""
    table = [np.asarray(v, dtype=float) for v in values]
    n = len(nodes)
    for level in range(1, n):
        for i in range(n - level):
            a, b = nodes[i], nodes[i + level]
            table[i] = (b * table[i] - a * table[i + 1]) / (b - a)
    return table[0]


def singular_set_check(t, n_boundary=200):
    """Distance of the limiting normals at the cusps to the four singular semicircles.

    Each path approaches a cusp at axial distances 1e-2 * 16^-j with the
    transverse fraction sqrt(1 - kappa^2 sqrt(delta)) (or on the axis); the
    normals are extrapolated polynomially in delta^(1/4) to the cusp.
    """
    n_boundary = int(n_boundary)
    if n_boundary < 8:
        raise InvalidArgumentError(f"n_boundary must be at least 8, got {n_boundary}")
    per_side = max(1, n_boundary // 16)
    kappas = np.linspace(0.2, 3.0, per_side)
    nodes = [d ** 0.25 for d in SINGULAR_PATH_DELTAS]

    details = []
    for cusp in CUSPS:
        for eps in (1, -1):
            spec = GraphSurfaceSpec.mm(t, eps)
            paths = [(None, 0)] + [(float(k), side) for k in kappas for side in (1, -1)]
            for kappa, side in paths:
                normals = []
                for delta in SINGULAR_PATH_DELTAS:
                    lam = 0.0 if kappa is None else side * np.sqrt(1.0 - kappa ** 2 * np.sqrt(delta))
                    px, py = _path_point(cusp, delta, lam)
                    normals.append(curvature_arrays(spec, px, py)['normal'])
                limit = _neville_at_zero(nodes, normals)
                limit = limit / np.linalg.norm(limit)
                details.append(SingularSample(
                    cusp=cusp, sheet=eps, kappa=kappa, side=side,
                    normal=tuple(float(v) for v in limit),
                    distance=singular_set_distance(limit),
                    raw_distance=singular_set_distance(normals[-1]),
                ))

    cusp_error = cusp_normal_error(t)
    report = SingularSetReport(
        t=float(t), samples=len(details),
        max_distance=max(d.distance for d in details),
        max_distance_raw=max(d.raw_distance for d in details),
        cusp_normal_error=cusp_error, details=details,
    )
    logger.info(f"Singular set check t={float(t):.6g}: {report.samples} paths, max distance "
                f"{report.max_distance:.3e} (raw {report.max_distance_raw:.3e}), cusp error {cusp_error:.3e}")
    return report


def cusp_normal_error(t):
    """Largest deviation of the computed cusp normals from the expected ones, plus their distance to the semicircles."""
    worst = 0.0
    for (cusp, eps), expected in CUSP_NORMALS.items():
        normal = gauss_map(GraphSurfaceSpec.mm(t, eps), *cusp)
        worst = max(worst, float(np.linalg.norm(normal - np.array(expected))),
                    singular_set_distance(normal))
    return worst


def singular_decay_scan(t, distances=SINGULAR_PATH_DELTAS):
    """R_h = r1 r2 and (r1 + r2)/2 along the axes into each cusp, on both sheets."""
    samples = []
    for cusp in CUSPS:
        for eps in (1, -1):
            spec = GraphSurfaceSpec.mm(t, eps)
            for delta in distances:
                px, py = _path_point(cusp, float(delta), 0.0)
                data = curvature_arrays(spec, px, py)
                r1, r2 = float(data['r1']), float(data['r2'])
                samples.append(DecaySample(cusp=cusp, sheet=eps, delta=float(delta),
                                           R_h=r1 * r2, mean_radius=0.5 * (r1 + r2)))
    return samples


def symmetry_defect(t, rng, count=200):
    """Largest violation of the sheet-exchanging symmetries at random points of D.

    x -> -x and y -> -y map sheet eps to -eps; the swap (x, y) -> (y, x)
    composed with z -> -z does the same.
    """
    points = []
    while len(points) < count:
        candidate = rng.uniform(-1.0, 1.0, size=2)
        if boundary_distance(*candidate) > 1e-6:
            points.append(candidate)
    x, y = np.array(points).T
    defects = {'mirror_x': 0.0, 'mirror_y': 0.0, 'swap': 0.0}
    for eps in (1, -1):
        h = surface_height(t, eps, x, y)
        defects['mirror_x'] = max(defects['mirror_x'], float(np.max(np.abs(surface_height(t, -eps, -x, y) - h))))
        defects['mirror_y'] = max(defects['mirror_y'], float(np.max(np.abs(surface_height(t, -eps, x, -y) - h))))
        defects['swap'] = max(defects['swap'], float(np.max(np.abs(surface_height(t, -eps, y, x) + h))))
    return defects


# --- Convexification ---

def convexify_radius(scan):
    """Smallest R making every sampled radius r1 + R nonnegative."""
    if scan is None or scan.samples == 0 or scan.min_r1 is None:
        raise InvalidArgumentError("convexify_radius needs a non-empty radii scan")
    return max(0.0, -float(scan.min_r1))


def alexandrov_check(scan, R):
    """Principal-radius condition for the surface with support function h + R.

    With k = 1/R and k_i = 1/(r_i + R): the surface is convex when every
    shifted radius is positive, and (k1 - k)(k2 - k) <= 0 wherever r1 r2 <= 0.
    """
    R = float(R)
    if R <= 0.0:
        raise InvalidArgumentError(f"R must be positive, got {R}")
    if scan is None or scan.table is None or scan.table.empty:
        raise InvalidArgumentError("alexandrov_check needs a radii scan with its sample table")
    r1 = scan.table['r1'].to_numpy()
    r2 = scan.table['r2'].to_numpy()
    finite = np.isfinite(r1) & np.isfinite(r2)
    r1, r2 = r1[finite], r2[finite]
    k = 1.0 / R
    s1, s2 = r1 + R, r2 + R
    with np.errstate(divide='ignore', invalid='ignore'):
        condition = (1.0 / s1 - k) * (1.0 / s2 - k)
    product = (s1 - R) * (s2 - R)
    identity_defect = np.abs(product - r1 * r2) / ((np.abs(r1) + R) * (np.abs(r2) + R))
    convex = bool(np.min(s1) > 0.0)
    result = AlexandrovCheck(
        R=R, k=k, min_shifted_r1=float(np.min(s1)), max_product=float(np.max(product)),
        max_condition=float(np.max(condition)), identity_defect=float(np.max(identity_defect)), convex=convex,
        condition_holds=bool(convex and np.max(condition) <= 0.0),
    )
    logger.info(f"Alexandrov check R={R:.6g}: convex={result.convex}, max condition {result.max_condition:.3e}")
    return result


