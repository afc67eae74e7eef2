"""Second-order forward-mode dual numbers in two variables.

A ``Jet2`` carries a value together with its gradient and Hessian with
respect to two seed variables (x, y). Components may be floats, numpy arrays
(vectorised scans) or ``Interval`` objects (rigorous enclosures); the
arithmetic below only uses operators those types share, plus the dispatching
helpers ``sqrt`` and ``power``. Components may themselves be jets, which
gives third-order data for centered enclosures.
"""
import numpy as np

from utils.interval import Interval


def _sqrt_value(v):
    if isinstance(v, (Jet2, Interval)):
        return v.sqrt()
    return np.sqrt(v)


def _pow_value(v, p):
    if isinstance(v, (Jet2, Interval)):
        return v ** p
    return np.power(v, p)


class Jet2:
    __slots__ = ('val', 'dx', 'dy', 'dxx', 'dxy', 'dyy')
    __array_ufunc__ = None

    def __init__(self, val, dx=0.0, dy=0.0, dxx=0.0, dxy=0.0, dyy=0.0):
        self.val = val
        self.dx = dx
        self.dy = dy
        self.dxx = dxx
        self.dxy = dxy
        self.dyy = dyy

    @classmethod
    def variables(cls, x, y):
        """Seed jets for the two independent variables."""
        return cls(x, 1.0, 0.0), cls(y, 0.0, 1.0)

    @property
    def gradient(self):
        return self.dx, self.dy

    @property
    def hessian(self):
        return self.dxx, self.dxy, self.dyy

    def __repr__(self):
        return f"Jet2(val={self.val!r}, grad=({self.dx!r}, {self.dy!r}))"

    def _chain(self, f0, f1, f2):
        """Compose with a scalar function given its value and first two derivatives."""
        return Jet2(
            f0,
            f1 * self.dx,
            f1 * self.dy,
            f2 * self.dx ** 2 + f1 * self.dxx,
            f2 * (self.dx * self.dy) + f1 * self.dxy,
            f2 * self.dy ** 2 + f1 * self.dyy,
        )

    def __neg__(self):
        return Jet2(-self.val, -self.dx, -self.dy, -self.dxx, -self.dxy, -self.dyy)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.val + other.val, self.dx + other.dx, self.dy + other.dy,
                        self.dxx + other.dxx, self.dxy + other.dxy, self.dyy + other.dyy)
        return Jet2(self.val + other, self.dx, self.dy, self.dxx, self.dxy, self.dyy)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet2):
            a, b = self, other
            return Jet2(
                a.val * b.val,
                a.dx * b.val + a.val * b.dx,
                a.dy * b.val + a.val * b.dy,
                a.dxx * b.val + 2.0 * (a.dx * b.dx) + a.val * b.dxx,
                a.dxy * b.val + a.dx * b.dy + a.dy * b.dx + a.val * b.dxy,
                a.dyy * b.val + 2.0 * (a.dy * b.dy) + a.val * b.dyy,
            )
        return Jet2(self.val * other, self.dx * other, self.dy * other,
                    self.dxx * other, self.dxy * other, self.dyy * other)

    __rmul__ = __mul__

    def reciprocal(self):
        inv = 1.0 / self.val
        inv2 = inv * inv
        return self._chain(inv, -inv2, 2.0 * (inv2 * inv))

    def __truediv__(self, other):
        if isinstance(other, (Jet2, Interval)):
            return self * other.reciprocal()
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, exponent):
        if isinstance(exponent, (int, np.integer)):
            n = int(exponent)
            if n == 0:
                return Jet2(_pow_value(self.val, 0))
            if n == 1:
                return self
            f0 = _pow_value(self.val, n)
            f1 = n * _pow_value(self.val, n - 1)
            f2 = (n * (n - 1)) * _pow_value(self.val, n - 2)
            return self._chain(f0, f1, f2)
        p = float(exponent)
        f0 = _pow_value(self.val, p)
        f1 = p * _pow_value(self.val, p - 1.0)
        f2 = (p * (p - 1.0)) * _pow_value(self.val, p - 2.0)
        return self._chain(f0, f1, f2)

    def sqrt(self):
        root = _sqrt_value(self.val)
        inv_root = 1.0 / root
        return self._chain(root, 0.5 * inv_root, -0.25 * (inv_root / self.val))


def sqrt(value):
    if isinstance(value, Jet2):
        return value.sqrt()
    return _sqrt_value(value)


def power(value, exponent):
    if isinstance(value, Jet2):
        return value ** exponent
    return _pow_value(value, exponent)


def sin(value):
    if isinstance(value, Jet2):
        s = np.sin(value.val)
        return value._chain(s, np.cos(value.val), -s)
    return np.sin(value)


def cos(value):
    if isinstance(value, Jet2):
        c = np.cos(value.val)
        return value._chain(c, -np.sin(value.val), -c)
    return np.cos(value)
