"""Tests for app/services/certify.py: interval enclosures and adaptive sign certification."""

from fractions import Fraction

import numpy as np
import numpy.testing as npt
import pytest

from app.exceptions import EmptyRegionError, InvalidArgumentError
from app.services.certify import CurvNumerator, Radicand, certify_sign, interval_eval
from app.services.graph_surface import (
    GraphSurfaceSpec, boundary_distance, curvature_arrays, curvature_numerator_expr, mm_radicand, radicand_expr,
)
from utils.interval import Interval
from utils.pydantic_schema import IntervalBox

T = Fraction(1, 12)


def _box(half):
    return IntervalBox(xlo=-half, xhi=half, ylo=-half, yhi=half)


def _random_boxes(rng, count):
    """Small boxes whose corners all lie inside D (D is not convex, so edges may still leave it)."""
    boxes = []
    while len(boxes) < count:
        cx, cy = rng.uniform(-0.8, 0.8, size=2)
        wx, wy = rng.uniform(1e-4, 0.05, size=2)
        corners = [(cx + sx * wx, cy + sy * wy) for sx in (-1, 1) for sy in (-1, 1)]
        if all(boundary_distance(x, y) > 1e-3 for x, y in corners):
            boxes.append((cx - wx, cx + wx, cy - wy, cy + wy))
    return boxes


def _sample_points(rng, boxes, per_box):
    """per_box uniform points in every box, with the mask of those inside D."""
    sx, sy = rng.uniform(0.0, 1.0, size=(2, len(boxes), per_box))
    x = boxes[:, :1] + sx * (boxes[:, 1:2] - boxes[:, :1])
    y = boxes[:, 2:3] + sy * (boxes[:, 3:4] - boxes[:, 2:3])
    return x, y, boundary_distance(x, y) >= 0.0


class TestEnclosures:
    def test_radicand_near_center(self):
        values = interval_eval(Radicand(), _box(0.05))
        assert float(values.lo) > 0.9

    def test_radicand_at_cusp_contains_zero(self):
        values = interval_eval(Radicand(), IntervalBox(xlo=0.99, xhi=1.0, ylo=-0.01, yhi=0.01))
        assert float(values.lo) <= 0.0 <= float(values.hi)

    def test_base_curvature_bound(self):
        values = interval_eval(CurvNumerator(t=Fraction(0)), _box(0.5))
        assert float(values.hi) < 0.0
        assert values.contains(-4.0)

    def test_outside_region(self):
        with pytest.raises(EmptyRegionError):
            interval_eval(Radicand(), IntervalBox(xlo=2.0, xhi=3.0, ylo=2.0, yhi=3.0))

    def test_names(self):
        assert Radicand().name == "radicand"
        assert "t=1/12" in CurvNumerator(T, -1).name

    def test_radicand_soundness(self, rng):
        # 2000 boxes x 5 points: at least 10^4 memberships before the domain filter
        boxes = np.array(_random_boxes(rng, 2000))
        values = Radicand().enclosure(Interval(boxes[:, 0], boxes[:, 1]), Interval(boxes[:, 2], boxes[:, 3]))
        x, y, inside = _sample_points(rng, boxes, 5)
        assert inside.sum() >= 9000
        sampled = mm_radicand(x[inside], y[inside], clamp=False)
        lo, hi = (np.broadcast_to(v[:, None], x.shape)[inside] for v in (values.lo, values.hi))
        assert np.all((lo <= sampled) & (sampled <= hi))

    @pytest.mark.parametrize("eps", [1, -1])
    def test_curvature_soundness(self, rng, eps):
        boxes = np.array(_random_boxes(rng, 2000))
        values = CurvNumerator(T, eps).enclosure(Interval(boxes[:, 0], boxes[:, 1]), Interval(boxes[:, 2], boxes[:, 3]))
        x, y, inside = _sample_points(rng, boxes, 5)
        assert inside.sum() >= 9000
        k_num = curvature_arrays(GraphSurfaceSpec.mm(T, eps), x[inside], y[inside])['K_numerator']
        lo, hi = (np.broadcast_to(v[:, None], x.shape)[inside] for v in (values.lo, values.hi))
        slack = 1e-9 * np.maximum(1.0, np.abs(k_num))
        assert np.all((lo - slack <= k_num) & (k_num <= hi + slack))

    def test_centered_form_never_widens(self, rng):
        boxes = np.array(_random_boxes(rng, 300))
        X, Y = Interval(boxes[:, 0], boxes[:, 1]), Interval(boxes[:, 2], boxes[:, 3])
        values = CurvNumerator(T, 1).enclosure(X, Y)
        with np.errstate(all='ignore'):
            plain = curvature_numerator_expr(X, Y, Interval.enclose(T)) * \
                (radicand_expr(X, Y) ** 2 * 16.0).reciprocal_positive()
        assert np.all(values.lo >= plain.lo)
        assert np.all(values.hi <= plain.hi)

    def test_numerator_matches_hessian(self, rng):
        x, y = rng.uniform(-0.7, 0.7, size=(2, 400))
        keep = boundary_distance(x, y) > 0.05
        x, y = x[keep], y[keep]
        for eps in (1, -1):
            tau = float(T) * eps
            expected = curvature_arrays(GraphSurfaceSpec.mm(T, eps), x, y)['K_numerator']
            scaled = curvature_numerator_expr(x, y, tau) / (16.0 * mm_radicand(x, y) ** 2)
            npt.assert_allclose(scaled, expected, rtol=1e-8, atol=1e-10)


class TestCertifySign:
    def test_base_curvature_certified_immediately(self):
        cert = certify_sign(CurvNumerator(t=Fraction(0)), 0.0, '<0', max_depth=12, budget=100_000, root=_box(0.5))
        assert cert.verdict == 'Certified'
        assert cert.boxes == 1
        assert cert.depth == 0

    def test_curvature_center(self):
        cert = certify_sign(CurvNumerator(T, 1), 0.0, '<0', max_depth=14, budget=200_000, root=_box(0.25))
        assert cert.verdict == 'Certified'
        assert cert.worst_box is None

    @pytest.mark.parametrize("eps", [1, -1])
    def test_counterexample_sheets_certified(self, eps):
        cert = certify_sign(CurvNumerator(T, eps), 1e-2, '<0', max_depth=24, budget=5_000_000)
        assert cert.verdict == 'Certified', cert.worst_box
        assert cert.discarded > 0
        assert cert.worst_box is None

    def test_radicand_interior(self):
        cert = certify_sign(Radicand(), 0.0, '>=0', max_depth=12, budget=100_000, root=_box(0.3))
        assert cert.verdict == 'Certified'
        assert "within" in cert.region

    def test_strict_claim_never_contact(self):
        cert = certify_sign(CurvNumerator(T, 1), 0.0, '<0', max_depth=6, budget=100_000)
        assert cert.verdict == 'Undecided'
        assert cert.contact_count == 0
        assert cert.worst_box is not None
        assert cert.bounds is not None

    def test_radicand_on_full_domain(self):
        first = certify_sign(Radicand(), 0.0, '>=0', max_depth=8, budget=100_000)
        second = certify_sign(Radicand(), 0.0, '>=0', max_depth=8, budget=100_000)
        assert first.verdict in ('BoundaryContact', 'Undecided')
        assert first.discarded > 0
        assert (first.verdict, first.boxes, first.depth, first.contact_count) == \
               (second.verdict, second.boxes, second.depth, second.contact_count)
        assert len(first.contact_boxes) <= 50

    def test_budget_exhaustion(self):
        cert = certify_sign(CurvNumerator(T, 1), 1e-2, '<0', max_depth=30, budget=50)
        assert cert.verdict == 'Undecided'
        assert cert.boxes <= 50

    def test_certificate_serializes(self):
        cert = certify_sign(CurvNumerator(t=Fraction(0)), 0.0, '<0', max_depth=4, budget=1000, root=_box(0.5))
        assert '"verdict": "Certified"' in cert.model_dump_json(indent=2)

    @pytest.mark.parametrize("kwargs", [
        {'claim': '!=0'},
        {'max_depth': 41},
        {'max_depth': -1},
        {'budget': 0},
        {'margin': 1.0},
        {'margin': -0.1},
    ])
    def test_invalid_arguments(self, kwargs):
        arguments = {'margin': 0.0, 'claim': '>=0', 'max_depth': 4, 'budget': 100}
        arguments.update(kwargs)
        with pytest.raises(InvalidArgumentError):
            certify_sign(Radicand(), **arguments)
