"""Tests for utils/interval.py and utils/jets.py."""

from fractions import Fraction

import numpy as np
import numpy.testing as npt
import pytest

from utils import jets
from utils.interval import Interval
from utils.jets import Jet2


def _random_intervals(rng, count, scale=3.0):
    a, b = rng.uniform(-scale, scale, size=(2, count))
    return Interval(np.minimum(a, b), np.maximum(a, b))


class TestEnclosure:
    @pytest.mark.parametrize("op", ["add", "sub", "mul", "div"])
    def test_binary_ops_enclose_samples(self, rng, op):
        X, Y = _random_intervals(rng, 500), _random_intervals(rng, 500)
        if op == "div":
            Y = Y + 3.5
        result = {"add": X + Y, "sub": X - Y, "mul": X * Y, "div": X / Y}[op]
        for s in rng.uniform(0.0, 1.0, size=(10, 2)):
            x = X.lo + s[0] * X.width
            y = Y.lo + s[1] * Y.width
            value = {"add": x + y, "sub": x - y, "mul": x * y, "div": x / y}[op]
            assert np.all(result.contains(value))

    def test_outward_rounding(self):
        third = Interval(1.0) / Interval(3.0)
        assert Fraction(float(third.lo)) < Fraction(1, 3) < Fraction(float(third.hi))

    def test_enclose_fraction(self):
        box = Interval.enclose(Fraction(1, 12))
        assert Fraction(float(box.lo)) <= Fraction(1, 12) <= Fraction(float(box.hi))
        assert box.lo < box.hi
        exact = Interval.enclose(Fraction(1, 4))
        assert exact.lo == exact.hi == 0.25

    def test_checked(self):
        with pytest.raises(ValueError):
            Interval.checked(1.0, 0.0)

    def test_reciprocal_straddling_zero(self):
        r = Interval(-1.0, 2.0).reciprocal()
        assert r.lo == -np.inf and r.hi == np.inf

    def test_even_power_is_tight(self):
        sq = Interval(-2.0, 1.0) ** 2
        assert sq.lo == 0.0
        assert 4.0 <= sq.hi < 4.0 + 1e-14

    def test_odd_power(self):
        cube = Interval(-2.0, 1.0) ** 3
        assert cube.lo <= -8.0 and cube.hi >= 1.0

    def test_zero_annihilates_unbounded(self):
        z = Interval(-np.inf, np.inf) * 0.0
        assert z.lo == 0.0 and z.hi == 0.0

    def test_sqrt_and_real_power_clip_negative_part(self):
        root = Interval(-1.0, 4.0).sqrt()
        assert root.lo == 0.0 and root.hi >= 2.0
        p = Interval(0.25, 1.0).pow_real(2.5)
        assert p.contains(0.25 ** 2.5) and p.contains(1.0)

    def test_abs(self):
        a = abs(Interval(np.array([-2.0, 1.0, -3.0]), np.array([1.0, 2.0, -1.0])))
        npt.assert_array_equal(a.lo, [0.0, 1.0, 1.0])
        npt.assert_array_equal(a.hi, [2.0, 2.0, 3.0])

    def test_batch_indexing(self):
        X = Interval(np.arange(4.0), np.arange(4.0) + 1.0)
        assert len(X) == 4
        part = X[np.array([True, False, True, False])]
        npt.assert_array_equal(part.lo, [0.0, 2.0])
        npt.assert_array_equal(X.mid, [0.5, 1.5, 2.5, 3.5])


class TestJets:
    def test_polynomial(self):
        x, y = Jet2.variables(0.7, -0.4)
        u = x ** 2 * y
        assert u.val == pytest.approx(0.49 * -0.4)
        assert u.gradient == pytest.approx((2 * 0.7 * -0.4, 0.49))
        assert u.hessian == pytest.approx((2 * -0.4, 2 * 0.7, 0.0))

    def test_quotient_and_sqrt(self):
        x, y = Jet2.variables(0.3, 0.5)
        u = jets.sqrt(1.0 + x * y) / (2.0 - x)
        # central differences of the same expression
        def f(a, b):
            return np.sqrt(1.0 + a * b) / (2.0 - a)
        h = 1e-4
        assert u.dx == pytest.approx((f(0.3 + h, 0.5) - f(0.3 - h, 0.5)) / (2 * h), rel=1e-6)
        assert u.dy == pytest.approx((f(0.3, 0.5 + h) - f(0.3, 0.5 - h)) / (2 * h), rel=1e-6)
        dxy = (f(0.3 + h, 0.5 + h) - f(0.3 + h, 0.5 - h) - f(0.3 - h, 0.5 + h) + f(0.3 - h, 0.5 - h)) / (4 * h * h)
        assert u.dxy == pytest.approx(dxy, rel=1e-5)

    def test_real_power_and_trig(self):
        t = Jet2(0.4, 1.0, 0.0)
        u = jets.power(t, 2.5)
        assert u.dx == pytest.approx(2.5 * 0.4 ** 1.5)
        assert u.dxx == pytest.approx(2.5 * 1.5 * 0.4 ** 0.5)
        s, c = jets.sin(t), jets.cos(t)
        assert s.dxx == pytest.approx(-np.sin(0.4))
        assert c.dx == pytest.approx(-np.sin(0.4))

    def test_dispatchers_on_plain_values(self):
        assert jets.sqrt(4.0) == 2.0
        assert jets.power(4.0, 0.5) == pytest.approx(2.0)
        assert jets.cos(0.0) == 1.0

    def test_arrays(self):
        x, y = Jet2.variables(np.array([0.1, 0.2]), np.array([0.3, 0.4]))
        u = x * y
        npt.assert_allclose(u.dxy, [1.0, 1.0])
        npt.assert_allclose(u.dx, [0.3, 0.4])

    def test_interval_jets_enclose_point_jets(self, rng):
        X, Y = Interval(0.2, 0.3), Interval(-0.1, 0.05)
        jx, jy = Jet2.variables(X, Y)
        box = jets.sqrt(1.0 + jx ** 2 * jy) - jx * jy ** 3
        for a, b in zip(rng.uniform(0.2, 0.3, 20), rng.uniform(-0.1, 0.05, 20)):
            px, py = Jet2.variables(a, b)
            point = jets.sqrt(1.0 + px ** 2 * py) - px * py ** 3
            for part in ('val', 'dx', 'dy', 'dxx', 'dxy', 'dyy'):
                assert getattr(box, part).contains(getattr(point, part))

    def test_nested_jets_give_third_derivatives(self):
        x, y = Jet2.variables(*Jet2.variables(0.5, 0.2))
        u = x ** 3 * y + jets.sqrt(1.0 + x)
        assert u.val.val == pytest.approx(0.125 * 0.2 + np.sqrt(1.5))
        assert u.dxx.dx == pytest.approx(6 * 0.2 + 0.375 * 1.5 ** -2.5)
        assert u.dxy.dx == pytest.approx(6 * 0.5)
        assert u.dxy.dy == pytest.approx(0.0)

    def test_interval_defers_to_jets(self):
        x, _ = Jet2.variables(0.5, 0.0)
        scaled = Interval(1.0, 2.0) * x
        shifted = Interval(1.0, 2.0) - x
        assert isinstance(scaled, Jet2) and isinstance(shifted, Jet2)
        assert scaled.dx.contains(1.5)
        assert shifted.val.contains(1.0)
        assert shifted.dx == -1.0
