"""Forward-mode scalar rings: dual numbers and truncated t-polynomials.

Both classes are generic over their coefficient ring, so they nest: a
``Dual`` whose gradient entries are themselves ``Dual`` carries second
derivatives, and a ``TJet`` over ``Dual`` coefficients differentiates a
curve of jets.  Plain ``float``/``int`` promote on contact.

Mixing discipline: ``Dual`` arithmetic refuses ``TJet`` operands (returns
``NotImplemented``), so Python falls through to the ``TJet`` reflected
operation and the dual is absorbed as a jet coefficient.  Jets therefore
always sit outside duals of the same construction layer.
"""

import math

from .errors import DomainError, UsageError

__all__ = [
    "Dual",
    "TJet",
    "dual_lift",
    "jet_add",
    "jet_mul",
    "jet_scale",
    "jet_apply_unary",
    "rexp",
    "rlog",
    "rsin",
    "rcos",
    "rsqrt",
    "rrecip",
    "rpow",
    "zero_like",
    "one_like",
    "real_part",
]


class Dual:
    """Value plus first-derivative vector.

    Parameters
    ----------
    v :
        Point value, any ring element.
    g : tuple
        Derivative with respect to each seed direction, entries in the
        same ring as ``v``.
    """

    __slots__ = ("v", "g")

    def __init__(self, v, g):
        self.v = v
        self.g = g if type(g) is tuple else tuple(g)

    def __repr__(self):
        return f"Dual({self.v!r}, {self.g!r})"

    def __eq__(self, other):
        return isinstance(other, Dual) and self.v == other.v and self.g == other.g

    def __hash__(self):
        return hash((Dual, self.v, self.g))

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.v + other.v, tuple(a + b for a, b in zip(self.g, other.g)))
        if isinstance(other, TJet):
            return NotImplemented
        return Dual(self.v + other, self.g)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.v - other.v, tuple(a - b for a, b in zip(self.g, other.g)))
        if isinstance(other, TJet):
            return NotImplemented
        return Dual(self.v - other, self.g)

    def __rsub__(self, other):
        if isinstance(other, TJet):
            return NotImplemented
        return Dual(other - self.v, tuple(-a for a in self.g))

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(
                self.v * other.v,
                tuple(a * other.v + self.v * b for a, b in zip(self.g, other.g)),
            )
        if isinstance(other, TJet):
            return NotImplemented
        return Dual(self.v * other, tuple(a * other for a in self.g))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            r = rrecip(other.v)
            val = self.v * r
            return Dual(val, tuple((a - val * b) * r for a, b in zip(self.g, other.g)))
        if isinstance(other, TJet):
            return NotImplemented
        r = rrecip(other)
        return Dual(self.v * r, tuple(a * r for a in self.g))

    def __rtruediv__(self, other):
        if isinstance(other, TJet):
            return NotImplemented
        r = rrecip(self.v)
        val = other * r
        return Dual(val, tuple(-(val * b) * r for b in self.g))

    def __neg__(self):
        return Dual(-self.v, tuple(-a for a in self.g))

    def __pos__(self):
        return self

    def __pow__(self, exponent):
        return rpow(self, exponent)


class TJet:
    """Truncated polynomial in one formal variable t.

    ``c[j]`` is the coefficient of ``t**j``; the truncation order is
    ``len(c) - 1`` and is preserved by all operations.  Binary operations
    require equal orders (scalars promote to constants).
    """

    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = coeffs if type(coeffs) is tuple else tuple(coeffs)
        if not self.c:
            raise UsageError("empty jet")

    @classmethod
    def constant(cls, value, order):
        z = zero_like(value)
        return cls((value,) + (z,) * order)

    @classmethod
    def variable(cls, value, order):
        """Jet of value + t (requires order >= 1)."""
        if order < 1:
            raise UsageError("variable jet needs order >= 1")
        z = zero_like(value)
        return cls((value, one_like(value)) + (z,) * (order - 1))

    @property
    def order(self):
        return len(self.c) - 1

    def __repr__(self):
        return f"TJet({self.c!r})"

    def __eq__(self, other):
        return isinstance(other, TJet) and self.c == other.c

    def __hash__(self):
        return hash((TJet, self.c))

    def _match(self, other):
        if len(other.c) != len(self.c):
            raise UsageError(
                f"jet order mismatch: {len(self.c) - 1} vs {len(other.c) - 1}"
            )

    def __add__(self, other):
        if isinstance(other, TJet):
            self._match(other)
            return TJet(tuple(a + b for a, b in zip(self.c, other.c)))
        return TJet((self.c[0] + other,) + self.c[1:])

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, TJet):
            self._match(other)
            return TJet(tuple(a - b for a, b in zip(self.c, other.c)))
        return TJet((self.c[0] - other,) + self.c[1:])

    def __rsub__(self, other):
        return TJet((other - self.c[0],) + tuple(-a for a in self.c[1:]))

    def __mul__(self, other):
        if isinstance(other, TJet):
            self._match(other)
            a, b = self.c, other.c
            n = len(a)
            out = []
            for m in range(n):
                s = a[0] * b[m]
                for i in range(1, m + 1):
                    s = s + a[i] * b[m - i]
                out.append(s)
            return TJet(tuple(out))
        return TJet(tuple(a * other for a in self.c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TJet):
            return self * _jet_recip(other)
        r = rrecip(other)
        return TJet(tuple(a * r for a in self.c))

    def __rtruediv__(self, other):
        return _jet_recip(self) * other

    def __neg__(self):
        return TJet(tuple(-a for a in self.c))

    def __pos__(self):
        return self

    def __pow__(self, exponent):
        return rpow(self, exponent)


def zero_like(x):
    """Additive identity in the ring of ``x``."""
    if isinstance(x, Dual):
        return Dual(zero_like(x.v), tuple(zero_like(a) for a in x.g))
    if isinstance(x, TJet):
        return TJet(tuple(zero_like(a) for a in x.c))
    return type(x)(0) if not isinstance(x, (int, float)) else 0.0


def one_like(x):
    """Multiplicative identity in the ring of ``x``."""
    if isinstance(x, Dual):
        return Dual(one_like(x.v), tuple(zero_like(a) for a in x.g))
    if isinstance(x, TJet):
        return TJet((one_like(x.c[0]),) + tuple(zero_like(a) for a in x.c[1:]))
    return type(x)(1) if not isinstance(x, (int, float)) else 1.0


def real_part(x):
    """Innermost float core (point value of all nestings)."""
    if isinstance(x, Dual):
        return real_part(x.v)
    if isinstance(x, TJet):
        return real_part(x.c[0])
    return float(x)


def dual_lift(point, index=None):
    """Seed a point for forward differentiation.

    With ``index=None`` every coordinate becomes a ``Dual`` carrying the
    full identity seed matrix; with an integer index only that direction
    is seeded (single directional derivative, gradient tuples of length 1).

    Parameters
    ----------
    point : sequence
        Ring elements.
    index : int or None
        Direction to seed, or None for the full basis.

    Returns
    -------
    tuple of Dual
    """
    pt = tuple(point)
    n = len(pt)
    if index is None:
        out = []
        for i, xi in enumerate(pt):
            z = zero_like(xi)
            g = tuple(one_like(xi) if j == i else z for j in range(n))
            out.append(Dual(xi, g))
        return tuple(out)
    if not 0 <= index < n:
        raise UsageError(f"seed index {index} out of range for dim {n}")
    out = []
    for i, xi in enumerate(pt):
        g = (one_like(xi) if i == index else zero_like(xi),)
        out.append(Dual(xi, g))
    return tuple(out)


# Elementary functions, generic over the ring.

def rexp(x):
    if isinstance(x, Dual):
        e = rexp(x.v)
        return Dual(e, tuple(e * a for a in x.g))
    if isinstance(x, TJet):
        return _jet_exp(x)
    return math.exp(x)


def rlog(x):
    if isinstance(x, Dual):
        r = rrecip(x.v)
        return Dual(rlog(x.v), tuple(a * r for a in x.g))
    if isinstance(x, TJet):
        return _jet_log(x)
    if x <= 0.0:
        raise DomainError(f"log of non-positive value {x}")
    return math.log(x)


def rsin(x):
    if isinstance(x, Dual):
        c = rcos(x.v)
        return Dual(rsin(x.v), tuple(c * a for a in x.g))
    if isinstance(x, TJet):
        return _jet_sincos(x)[0]
    return math.sin(x)


def rcos(x):
    if isinstance(x, Dual):
        s = rsin(x.v)
        return Dual(rcos(x.v), tuple(-(s * a) for a in x.g))
    if isinstance(x, TJet):
        return _jet_sincos(x)[1]
    return math.cos(x)


def rsqrt(x):
    if isinstance(x, Dual):
        s = rsqrt(x.v)
        half = 0.5 * rrecip(s)
        return Dual(s, tuple(half * a for a in x.g))
    if isinstance(x, TJet):
        return _jet_sqrt(x)
    if x <= 0.0:
        raise DomainError(f"sqrt of non-positive value {x}")
    return math.sqrt(x)


def rrecip(x):
    if isinstance(x, Dual):
        r = rrecip(x.v)
        rr = r * r
        return Dual(r, tuple(-(rr * a) for a in x.g))
    if isinstance(x, TJet):
        return _jet_recip(x)
    if x == 0:
        raise DomainError("reciprocal of zero")
    return 1.0 / x if isinstance(x, (int, float)) else type(x)(1) / x


def rpow(x, exponent):
    """x ** exponent with integer exponents done by repeated squaring."""
    if isinstance(exponent, (Dual, TJet)):
        return rexp(exponent * rlog(x))
    if isinstance(exponent, float) and exponent.is_integer():
        exponent = int(exponent)
    if isinstance(exponent, int):
        if exponent < 0:
            return rrecip(_ipow(x, -exponent))
        return _ipow(x, exponent)
    if isinstance(x, (Dual, TJet)):
        return rexp(exponent * rlog(x))
    if x <= 0.0:
        raise DomainError(f"fractional power of non-positive value {x}")
    return math.pow(x, exponent)


def _ipow(x, n):
    if n == 0:
        return one_like(x)
    acc = None
    base = x
    while n:
        if n & 1:
            acc = base if acc is None else acc * base
        n >>= 1
        if n:
            base = base * base
    return acc


# Truncated power-series recurrences.  Every recurrence reduces the order-m
# coefficient to lower-order data, so each runs in one pass.

def _jet_exp(a):
    k = a.order
    b = [rexp(a.c[0])]
    for m in range(1, k + 1):
        s = a.c[1] * b[m - 1]
        for i in range(2, m + 1):
            s = s + (float(i) * a.c[i]) * b[m - i]
        b.append(s * (1.0 / m))
    return TJet(tuple(b))


def _jet_log(a):
    if real_part(a.c[0]) <= 0.0:
        raise DomainError("log of jet with non-positive constant term")
    k = a.order
    r0 = rrecip(a.c[0])
    b = [rlog(a.c[0])]
    for m in range(1, k + 1):
        s = float(m) * a.c[m]
        for i in range(1, m):
            s = s - (float(i) * b[i]) * a.c[m - i]
        b.append(s * ((1.0 / m) * r0))
    return TJet(tuple(b))


def _jet_sincos(a):
    k = a.order
    s = [rsin(a.c[0])]
    c = [rcos(a.c[0])]
    for m in range(1, k + 1):
        ps = a.c[1] * c[m - 1]
        pc = a.c[1] * s[m - 1]
        for i in range(2, m + 1):
            ps = ps + (float(i) * a.c[i]) * c[m - i]
            pc = pc + (float(i) * a.c[i]) * s[m - i]
        s.append(ps * (1.0 / m))
        c.append(-(pc * (1.0 / m)))
    return TJet(tuple(s)), TJet(tuple(c))


def _jet_sqrt(a):
    if real_part(a.c[0]) <= 0.0:
        raise DomainError("sqrt of jet with non-positive constant term")
    k = a.order
    b = [rsqrt(a.c[0])]
    half_r = 0.5 * rrecip(b[0])
    for m in range(1, k + 1):
        s = a.c[m]
        for i in range(1, m):
            s = s - b[i] * b[m - i]
        b.append(s * half_r)
    return TJet(tuple(b))


def _jet_recip(a):
    if real_part(a.c[0]) == 0.0:
        raise DomainError("reciprocal of jet with zero constant term")
    k = a.order
    r0 = rrecip(a.c[0])
    b = [r0]
    for m in range(1, k + 1):
        s = a.c[1] * b[m - 1]
        for i in range(2, m + 1):
            s = s + a.c[i] * b[m - i]
        b.append(-(r0 * s))
    return TJet(tuple(b))


# Thin functional aliases kept for the public contract.

def jet_add(a, b):
    return a + b


def jet_mul(a, b):
    return a * b


def jet_scale(a, scalar):
    return a * scalar


_UNARY = {
    "exp": rexp,
    "log": rlog,
    "sin": rsin,
    "cos": rcos,
    "sqrt": rsqrt,
    "recip": rrecip,
}


def jet_apply_unary(tag, jet):
    try:
        fn = _UNARY[tag]
    except KeyError:
        raise UsageError(f"unknown unary function {tag!r}") from None
    return fn(jet)
