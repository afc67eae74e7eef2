"""Outward-rounded interval arithmetic over numpy arrays.

An ``Interval`` holds lower/upper bounds that are floats or equally shaped
numpy arrays, so one object can carry a whole batch of boxes. Directed
rounding is not available from numpy, therefore every primitive widens its
result by ``ULPS`` units in the last place with ``np.nextafter``.
"""
from fractions import Fraction

import numpy as np

ULPS = 4


def _down(values):
    out = np.asarray(values, dtype=float)
    for _ in range(ULPS):
        out = np.nextafter(out, -np.inf)
    return out


def _up(values):
    out = np.asarray(values, dtype=float)
    for _ in range(ULPS):
        out = np.nextafter(out, np.inf)
    return out


def _fix_nan(lo, hi):
    # 0 * inf shows up when an operand is unbounded
    return np.where(np.isnan(lo), -np.inf, lo), np.where(np.isnan(hi), np.inf, hi)


class Interval:
    __slots__ = ('lo', 'hi')
    __array_ufunc__ = None

    def __init__(self, lo, hi=None):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(lo if hi is None else hi, dtype=float)

    @classmethod
    def checked(cls, lo, hi):
        lo_arr, hi_arr = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
        if np.any(lo_arr > hi_arr):
            raise ValueError(f"Invalid interval: [{lo}, {hi}]")
        return cls(lo_arr, hi_arr)

    @classmethod
    def enclose(cls, value):
        """Tightest float interval containing an exact number (Fraction, int or float)."""
        if isinstance(value, Fraction):
            nearest = float(value)
            if Fraction(nearest) == value:
                return cls(nearest, nearest)
            return cls(np.nextafter(nearest, -np.inf), np.nextafter(nearest, np.inf))
        return cls(float(value), float(value))

    def __repr__(self):
        if self.lo.ndim == 0:
            return f"[{float(self.lo):.6g}, {float(self.hi):.6g}]"
        return f"Interval(batch={self.lo.shape})"

    def __getitem__(self, index):
        return Interval(self.lo[index], self.hi[index])

    def __len__(self):
        return len(self.lo)

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return 0.5 * (self.lo + self.hi)

    def contains(self, value):
        return (self.lo <= value) & (value <= self.hi)

    def clip_nonnegative(self):
        """Intersection with [0, inf); used where the exact quantity is >= 0 on the domain."""
        return Interval(np.maximum(self.lo, 0.0), np.maximum(self.hi, 0.0))

    def _coerce(self, other):
        if isinstance(other, Interval):
            return other
        return Interval(other, other)

    @staticmethod
    def _foreign(other):
        # jets and other wrappers take over through their reflected operators
        return not isinstance(other, (Interval, int, float, np.ndarray, np.generic))

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __add__(self, other):
        if self._foreign(other):
            return NotImplemented
        other = self._coerce(other)
        return Interval(_down(self.lo + other.lo), _up(self.hi + other.hi))

    __radd__ = __add__

    def __sub__(self, other):
        if self._foreign(other):
            return NotImplemented
        other = self._coerce(other)
        return Interval(_down(self.lo - other.hi), _up(self.hi - other.lo))

    def __rsub__(self, other):
        if self._foreign(other):
            return NotImplemented
        return self._coerce(other).__sub__(self)

    def __mul__(self, other):
        if self._foreign(other):
            return NotImplemented
        if not isinstance(other, Interval) and np.ndim(other) == 0 and other == 0:
            # an exact zero factor annihilates even unbounded enclosures
            return Interval(np.zeros_like(self.lo), np.zeros_like(self.hi))
        other = self._coerce(other)
        with np.errstate(invalid='ignore'):
            products = np.stack(np.broadcast_arrays(
                self.lo * other.lo, self.lo * other.hi,
                self.hi * other.lo, self.hi * other.hi,
            ))
            lo, hi = _fix_nan(np.min(products, axis=0), np.max(products, axis=0))
        return Interval(_down(lo), _up(hi))

    __rmul__ = __mul__

    def reciprocal(self):
        straddles = (self.lo <= 0.0) & (self.hi >= 0.0)
        with np.errstate(divide='ignore', invalid='ignore'):
            lo = np.where(straddles, -np.inf, _down(1.0 / self.hi))
            hi = np.where(straddles, np.inf, _up(1.0 / self.lo))
        return Interval(lo, hi)

    def reciprocal_positive(self):
        """1/x for a quantity known to be positive wherever it is evaluated; unbounded above when lo <= 0."""
        with np.errstate(divide='ignore', invalid='ignore'):
            lo = np.where(self.hi > 0.0, _down(1.0 / self.hi), 0.0)
            hi = np.where(self.lo > 0.0, _up(1.0 / self.lo), np.inf)
        return Interval(np.maximum(lo, 0.0), hi)

    def __truediv__(self, other):
        if self._foreign(other):
            return NotImplemented
        other = self._coerce(other)
        if other.lo.ndim == 0 and other.lo == other.hi and other.lo != 0.0:
            # exact scalar divisor: divide endpoints directly
            d = float(other.lo)
            lo, hi = (self.lo / d, self.hi / d) if d > 0 else (self.hi / d, self.lo / d)
            return Interval(_down(lo), _up(hi))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        if self._foreign(other):
            return NotImplemented
        return self._coerce(other) * self.reciprocal()

    def __abs__(self):
        lo = np.where(self.lo >= 0.0, self.lo, np.where(self.hi <= 0.0, -self.hi, 0.0))
        hi = np.maximum(np.abs(self.lo), np.abs(self.hi))
        return Interval(lo, hi)

    def __pow__(self, exponent):
        if isinstance(exponent, (int, np.integer)):
            return self._int_pow(int(exponent))
        return self.pow_real(float(exponent))

    def _int_pow(self, n):
        if n == 0:
            return Interval(np.ones_like(self.lo), np.ones_like(self.hi))
        if n < 0:
            return self._int_pow(-n).reciprocal()
        with np.errstate(over='ignore', invalid='ignore'):
            lo_n, hi_n = self.lo ** n, self.hi ** n
        if n % 2:
            return Interval(_down(lo_n), _up(hi_n))
        abs_part = abs(self)
        with np.errstate(over='ignore'):
            return Interval(np.maximum(_down(abs_part.lo ** n), 0.0), _up(abs_part.hi ** n))

    def pow_real(self, p):
        """x**p for real p on the nonnegative part of the interval."""
        base = self.clip_nonnegative()
        if float(p).is_integer():
            return base._int_pow(int(p))
        with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
            a, b = np.power(base.lo, p), np.power(base.hi, p)
        if p > 0:
            return Interval(np.maximum(_down(a), 0.0), _up(b))
        return Interval(np.maximum(_down(b), 0.0), _up(a))

    def sqrt(self):
        base = self.clip_nonnegative()
        return Interval(np.maximum(_down(np.sqrt(base.lo)), 0.0), _up(np.sqrt(base.hi)))
