"""Rigorous sign certification by interval subdivision.

Boxes are processed one subdivision level at a time as numpy batches. A box
is discharged once its enclosure satisfies the claimed sign; the rest are
bisected along their longest edge until the depth or box budget runs out.
"""
import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from app.exceptions import EmptyRegionError, InvalidArgumentError
from app.services.graph_surface import base_g_expr, curvature_numerator_expr, domain_expr, radicand_expr
from config import Config
from utils.interval import Interval
from utils.jets import Jet2
from utils.pydantic_schema import IntervalBox, SignCertificate

logger = logging.getLogger('certify')

CLAIMS = ('>=0', '>0', '<0', '<=0')
STRICT_CLAIMS = ('>0', '<0')
MAX_CONTACT_BOXES = 50


@dataclass(frozen=True)
class Radicand:
    name: str = "radicand"

    def enclosure(self, X, Y):
        naive = radicand_expr(X, Y)
        # mean value form where the expression is smooth on the whole box
        b = 1.0 - X ** 4 - Y ** 4
        smooth = b.lo > 0.0
        if not np.any(smooth):
            return naive
        mx, my = Interval(X.mid), Interval(Y.mid)
        center = radicand_expr(mx, my)
        jx, jy = Jet2.variables(X, Y)
        jet = radicand_expr(jx, jy)
        mean_value = center + jet.dx * (X - mx) + jet.dy * (Y - my)
        lo = np.where(smooth, np.maximum(naive.lo, mean_value.lo), naive.lo)
        hi = np.where(smooth, np.minimum(naive.hi, mean_value.hi), naive.hi)
        return Interval(lo, hi)


@dataclass(frozen=True)
class CurvNumerator:
    """u_xx u_yy - u_xy^2 for the sheet eps of the surface with parameter t.

    The enclosure goes through curvature_numerator_expr, scaled back by the
    positive factor 1/(16 A^2). Boxes whose plain enclosure still contains 0
    are tightened with a centered form built from nested jets.
    """
    t: Fraction = Fraction(1, 12)
    eps: int = 1

    @property
    def name(self):
        return f"curvature(t={self.t}, eps={self.eps:+d})"

    def enclosure(self, X, Y):
        tau = Fraction(self.t) * self.eps
        if tau == 0:
            jx, jy = Jet2.variables(X, Y)
            uxx, uxy, uyy = base_g_expr(jx, jy).hessian
            return uxx * uyy - uxy ** 2
        tau = Interval.enclose(tau)
        radicand = radicand_expr(X, Y)
        scaled = curvature_numerator_expr(X, Y, tau)
        smooth = (radicand.lo > 0.0) & (scaled.lo <= 0.0) & (scaled.hi >= 0.0)
        if np.any(smooth):
            scaled = _centered(scaled, X, Y, smooth, lambda x, y: curvature_numerator_expr(x, y, tau))
        return scaled * (radicand ** 2 * 16.0).reciprocal_positive()


def _centered(naive, X, Y, mask, expr):
    """Intersect naive with the mean value form of expr on the boxes selected by mask."""
    shape = np.shape(naive.lo)
    idx = np.flatnonzero(np.broadcast_to(mask, shape))

    def take(values):
        return np.broadcast_to(values, shape).ravel()[idx]

    Xs, Ys = Interval(take(X.lo), take(X.hi)), Interval(take(Y.lo), take(Y.hi))
    mx, my = Interval(Xs.mid), Interval(Ys.mid)
    center = expr(mx, my)
    jet = expr(*Jet2.variables(Xs, Ys))
    mean_value = center + jet.dx * (Xs - mx) + jet.dy * (Ys - my)

    lo = np.array(np.broadcast_to(naive.lo, shape), dtype=float).ravel()
    hi = np.array(np.broadcast_to(naive.hi, shape), dtype=float).ravel()
    lo[idx] = np.fmax(lo[idx], mean_value.lo)
    hi[idx] = np.fmin(hi[idx], mean_value.hi)
    return Interval(lo.reshape(shape), hi.reshape(shape))


def interval_eval(expr, box, margin=0.0):
    """Enclosure of expr over box intersected with the (margin-shrunk) domain."""
    X = Interval.checked(box.xlo, box.xhi)
    Y = Interval.checked(box.ylo, box.yhi)
    domain = domain_expr(X, Y)
    if float(domain.hi) < margin:
        raise EmptyRegionError(f"Box {box} lies outside the region", box=box.model_dump())
    with np.errstate(all='ignore'):
        return expr.enclosure(X, Y)


def _discharged(values, claim):
    if claim == '>=0':
        return values.lo >= 0.0
    if claim == '>0':
        return values.lo > 0.0
    if claim == '<0':
        return values.hi < 0.0
    return values.hi <= 0.0


def _violation(values, claim):
    """How far each enclosure is from satisfying the claim (larger is worse)."""
    if claim in ('>=0', '>0'):
        return -values.lo
    return values.hi


def _refuted(values, claim):
    if claim in ('>=0', '>0'):
        return values.hi < 0.0
    return values.lo > 0.0


def _box(xlo, xhi, ylo, yhi, depth):
    return IntervalBox(xlo=float(xlo), xhi=float(xhi), ylo=float(ylo), yhi=float(yhi), depth=int(depth))


def _split(xlo, xhi, ylo, yhi):
    """Bisect every box along its longest edge."""
    split_x = (xhi - xlo) >= (yhi - ylo)
    xm = 0.5 * (xlo + xhi)
    ym = 0.5 * (ylo + yhi)
    left = (xlo, np.where(split_x, xm, xhi), ylo, np.where(split_x, yhi, ym))
    right = (np.where(split_x, xm, xlo), xhi, np.where(split_x, ylo, ym), yhi)
    return tuple(np.concatenate([a, b]) for a, b in zip(left, right))


def _region_label(margin, root):
    label = "D" if margin == 0 else f"D with margin {margin:g}"
    if root is not None:
        label += f" within [{root.xlo:g}, {root.xhi:g}] x [{root.ylo:g}, {root.yhi:g}]"
    return label


def certify_sign(expr, margin, claim, max_depth=None, budget=None, root: Optional[IntervalBox] = None):
    """Certify sign(expr) on {domain >= margin} (optionally within a root box).

    Non-strict claims may end in BoundaryContact: the boxes left at maximum
    depth all lie within one box width of the region's boundary. Strict
    claims end in Undecided instead.
    """
    max_depth = Config.DEFAULT_DEPTH if max_depth is None else int(max_depth)
    budget = Config.DEFAULT_BUDGET if budget is None else int(budget)
    if claim not in CLAIMS:
        raise InvalidArgumentError(f"Unknown claim {claim!r}; expected one of {CLAIMS}")
    if not 0 <= max_depth <= Config.MAX_DEPTH:
        raise InvalidArgumentError(f"max_depth must lie in [0, {Config.MAX_DEPTH}], got {max_depth}")
    if budget < 1:
        raise InvalidArgumentError(f"budget must be at least 1, got {budget}")
    if not 0.0 <= float(margin) < 1.0:
        raise InvalidArgumentError(f"margin must lie in [0, 1), got {margin}")

    start = time.perf_counter()
    root = root or IntervalBox(xlo=-1.0, xhi=1.0, ylo=-1.0, yhi=1.0)
    boxes = tuple(np.array([v], dtype=float) for v in (root.xlo, root.xhi, root.ylo, root.yhi))
    processed = discarded = 0
    contacts = []
    verdict = None
    worst = None
    level = 0

    logger.info(f"Certifying {expr.name} {claim} on {_region_label(margin, root)} "
                f"(depth {max_depth}, budget {budget})")

    while True:
        xlo, xhi, ylo, yhi = boxes
        processed += len(xlo)
        X, Y = Interval(xlo, xhi), Interval(ylo, yhi)
        with np.errstate(all='ignore'):
            domain = domain_expr(X, Y)
            outside = domain.hi < margin
            discarded += int(np.count_nonzero(outside))
            keep = ~outside
            xlo, xhi, ylo, yhi = xlo[keep], xhi[keep], ylo[keep], yhi[keep]
            if len(xlo) == 0:
                break
            values = expr.enclosure(Interval(xlo, xhi), Interval(ylo, yhi))

        open_mask = ~_discharged(values, claim)
        xlo, xhi, ylo, yhi = xlo[open_mask], xhi[open_mask], ylo[open_mask], yhi[open_mask]
        values = values[open_mask]
        if len(xlo) == 0:
            break

        refuted = _refuted(values, claim)
        exhausted = level >= max_depth or processed + 2 * len(xlo) > budget
        if np.any(refuted) or exhausted:
            if not np.any(refuted) and level >= max_depth and claim not in STRICT_CLAIMS:
                touching = _touches_boundary(xlo, xhi, ylo, yhi, margin)
                if np.all(touching):
                    contacts = [_box(*b, level) for b in zip(xlo, xhi, ylo, yhi)]
                    verdict = 'BoundaryContact'
                    break
                inner = ~touching
                xlo, xhi, ylo, yhi, values = xlo[inner], xhi[inner], ylo[inner], yhi[inner], values[inner]
            badness = _violation(values, claim)
            i = int(np.argmax(np.where(np.isnan(badness), np.inf, badness)))
            worst = (_box(xlo[i], xhi[i], ylo[i], yhi[i], level), (float(values.lo[i]), float(values.hi[i])))
            verdict = 'Undecided'
            break

        boxes = _split(xlo, xhi, ylo, yhi)
        level += 1

    if verdict is None:
        verdict = 'Certified'
    contact_diameter = max((np.hypot(b.xhi - b.xlo, b.yhi - b.ylo) for b in contacts), default=None)
    certificate = SignCertificate(
        expr=expr.name, region=_region_label(margin, root), sign=claim, verdict=verdict,
        boxes=processed, depth=level,
        worst_box=worst[0] if worst else None, bounds=worst[1] if worst else None,
        discarded=discarded, contact_count=len(contacts),
        contact_boxes=contacts[:MAX_CONTACT_BOXES],
        contact_max_diameter=float(contact_diameter) if contact_diameter is not None else None,
        seconds=time.perf_counter() - start,
    )
    logger.info(f"{expr.name} {claim}: {verdict} after {processed} boxes at depth {level}")
    if verdict == 'Undecided':
        logger.warning(f"Undecided certificate, worst box {certificate.worst_box} with bounds {certificate.bounds}")
    return certificate


def _touches_boundary(xlo, xhi, ylo, yhi, margin):
    """Boxes whose neighbourhood of one box width meets {domain = margin}."""
    wx, wy = xhi - xlo, yhi - ylo
    grown = domain_expr(Interval(xlo - wx, xhi + wx), Interval(ylo - wy, yhi + wy))
    return (grown.lo <= margin) & (grown.hi >= margin)
