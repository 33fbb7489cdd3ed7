"""Capped-precision arithmetic in Q_p and Laurent series over Q_p.

A value is stored as  unit * p^val + O(p^prec)  with the unit coprime to p,
so `prec` is the absolute precision and `prec - val` the relative precision.
Arithmetic never reports more precision than the inputs justify:
multiplication uses the min rule on relative precision, addition the min
rule on absolute precision, and division by p^k costs k digits of absolute
precision.

Series carry one precision per coefficient, which is what makes the formal
antiderivative rule (coefficient i+1 loses ord_p(i+1) digits) come out
automatically instead of needing a side channel.
"""

from fractions import Fraction

from .errors import (
    InsufficientPrecision,
    NotASquare,
    NotAUnit,
    PadicError,
    PrecisionExhausted,
    PrimeMismatch,
    TruncationUnderflow,
)

# relative precision used when exact integers/rationals enter series work;
# effectively "exact" next to the 6..16 digit working precisions in use
_EXACT_PREC = 64

_checked_primes = set()

_pow_cache = {}


def ppow(p, k):
    """Cached p**k for the small exponents that dominate arithmetic."""
    key = (p, k)
    v = _pow_cache.get(key)
    if v is None:
        v = p ** k
        if k <= 4096:
            _pow_cache[key] = v
    return v




def padic_val(n, p):
    """Valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is undefined")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _require_odd_prime(p):
    if p in _checked_primes:
        return
    if p < 3 or not _is_prime(p):
        raise ValueError("p must be an odd prime, got %s" % (p,))
    _checked_primes.add(p)


class PadicNumber:
    """An element of Q_p known modulo p^prec.

    Invariants: if unit == 0 the value is indistinguishable from zero at
    this precision and val == prec; otherwise 0 < unit < p^(prec-val) and
    p does not divide unit.
    """

    __slots__ = ("p", "val", "unit", "prec")

    def __init__(self, p, val, unit, prec):
        _require_odd_prime(p)
        if unit:
            rel = prec - val
            if rel <= 0:
                unit = 0
            else:
                unit %= ppow(p, rel)
        if unit == 0:
            val = prec
        else:
            shift = padic_val(unit, p)
            if shift:
                val += shift
                unit //= p ** shift
                if prec - val <= 0:
                    unit, val = 0, prec
                else:
                    unit %= ppow(p, prec - val)
        self.p = p
        self.val = val
        self.unit = unit
        self.prec = prec

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_int(cls, p, n, prec):
        return cls(p, 0, n, prec)

    @classmethod
    def from_rational(cls, p, q, prec):
        """Exact image of a rational number, known mod p^prec."""
        q = Fraction(q)
        if q == 0:
            return cls.zero(p, prec)
        num, den = q.numerator, q.denominator
        vn = padic_val(num, p)
        vd = padic_val(den, p)
        v = vn - vd
        rel = prec - v
        if rel <= 0:
            return cls.zero(p, prec)
        unit = (num // p ** vn) * pow(den // p ** vd, -1, p ** rel)
        return cls(p, v, unit, prec)

    @classmethod
    def zero(cls, p, prec):
        """Zero at absolute precision prec, i.e. O(p^prec)."""
        return cls(p, prec, 0, prec)

    @classmethod
    def one(cls, p, prec):
        return cls(p, 0, 1, prec)

    # -- predicates --------------------------------------------------------

    def is_zero(self):
        """True when indistinguishable from 0 at this precision."""
        return self.unit == 0

    def is_unit(self):
        return self.unit != 0 and self.val == 0

    @property
    def rel_prec(self):
        return self.prec - self.val

    # -- integer views -------------------------------------------------------

    def lift(self):
        """Integer representative unit*p^val (requires val >= 0)."""
        if self.is_zero():
            return 0
        if self.val < 0:
            raise ValueError("negative valuation; use as_fraction()")
        return self.unit * self.p ** self.val

    def as_fraction(self):
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit * self.p ** max(self.val, 0), self.p ** max(-self.val, 0))

    def balanced_lift(self):
        """Representative of least absolute value in (-p^prec/2, p^prec/2]."""
        n = self.lift() % self.p ** self.prec
        m = self.p ** self.prec
        return n - m if 2 * n > m else n

    def digit(self, i):
        """Digit of p^i in the canonical expansion, for i < prec."""
        if i >= self.prec:
            raise InsufficientPrecision("digit %d beyond O(p^%d)" % (i, self.prec))
        if self.is_zero() or i < self.val:
            return 0
        return (self.unit // self.p ** (i - self.val)) % self.p

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PadicNumber):
            if self.p != other.p:
                raise PrimeMismatch("p=%d vs p=%d" % (self.p, other.p))
            return other
        if isinstance(other, int):
            return PadicNumber(self.p, 0, other, max(self.prec, self.val) + _EXACT_PREC)
        if isinstance(other, Fraction):
            return PadicNumber.from_rational(self.p, other, max(self.prec, self.val) + _EXACT_PREC)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        prec = min(self.prec, other.prec)
        if self.is_zero() and other.is_zero():
            return PadicNumber.zero(self.p, prec)
        if self.is_zero():
            return other.truncate(prec)
        if other.is_zero():
            return self.truncate(prec)
        v = min(self.val, other.val)
        s = self.unit * ppow(self.p, self.val - v) + other.unit * ppow(self.p, other.val - v)
        return PadicNumber(self.p, v, s, prec)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return PadicNumber(self.p, self.val, ppow(self.p, self.rel_prec) - self.unit, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return PadicNumber.zero(self.p, self.val + other.val)
        rel = min(self.rel_prec, other.rel_prec)
        v = self.val + other.val
        return PadicNumber(self.p, v, self.unit * other.unit, v + rel)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise PrecisionExhausted("inverse of zero at precision O(p^%d)" % self.prec)
        rel = self.rel_prec
        inv = pow(self.unit, -1, ppow(self.p, rel))
        return PadicNumber(self.p, -self.val, inv, -self.val + rel)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = PadicNumber(self.p, 0, 1, (self.rel_prec if self.unit else self.prec) + 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        """Equality at the shared precision: a == b iff a-b is zero there."""
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    # -- precision management ---------------------------------------------

    def truncate(self, prec):
        """The same value known only mod p^prec (never raises precision)."""
        if prec > self.prec:
            raise InsufficientPrecision("cannot raise precision from %d to %d" % (self.prec, prec))
        if self.is_zero() or self.val >= prec:
            return PadicNumber.zero(self.p, prec)
        return PadicNumber(self.p, self.val, self.unit, prec)

    def require_rel(self, rel):
        if self.is_zero() or self.rel_prec < rel:
            have = "0" if self.is_zero() else str(self.rel_prec)
            raise PrecisionExhausted("needed %d significant digits, have %s" % (rel, have))
        return self

    # -- special functions --------------------------------------------------

    def teichmuller(self):
        """The (p-1)-st root of unity congruent to this unit mod p.

        Iterating x -> x^p gains at least one digit per step.
        """
        if not self.is_unit():
            raise NotAUnit("teichmuller lift needs a unit, got valuation %s" % self.val)
        m = self.p ** self.rel_prec
        x = self.unit % m
        for _ in range(self.rel_prec + 1):
            x = pow(x, self.p, m)
        return PadicNumber(self.p, 0, x, self.prec)

    def sqrt(self, branch_digit=None):
        """Square root by Hensel lifting.

        Deterministic branch: leading digit in 1..(p-1)/2, unless
        branch_digit forces the residue class of the root mod p.
        """
        if self.is_zero():
            raise NotASquare("sqrt of zero-at-precision is ambiguous")
        if self.val % 2:
            raise NotASquare("odd valuation %d" % self.val)
        p, rel = self.p, self.rel_prec
        r = _sqrt_mod_p(self.unit % p, p)
        if r is None:
            raise NotASquare("unit part is a non-residue mod %d" % p)
        s, k = r, 1
        while k < rel:
            k = min(2 * k, rel)
            mod = p ** k
            s = (s + self.unit % mod * pow(s, -1, mod)) * pow(2, -1, mod) % mod
        m = p ** rel
        if branch_digit is None:
            if s % p > (p - 1) // 2:
                s = m - s
        elif s % p != branch_digit % p:
            s = m - s
            if s % p != branch_digit % p:
                raise NotASquare("no square root with leading digit %d" % branch_digit)
        return PadicNumber(p, self.val // 2, s, self.val // 2 + rel)

    # -- rendering -----------------------------------------------------------

    def render(self):
        """Canonical text form: d0 + d1*p + ... + O(p^N), digits in [0,p)."""
        terms = []
        for i in range(self.val, self.prec):
            d = self.digit(i)
            if d == 0:
                continue
            if i == 0:
                terms.append(str(d))
            elif i == 1:
                terms.append(str(self.p) if d == 1 else "%d*%d" % (d, self.p))
            else:
                base = "%d^%d" % (self.p, i)
                terms.append(base if d == 1 else "%d*%s" % (d, base))
        body = " + ".join(terms) if terms else "0"
        return "%s + O(%d^%d)" % (body, self.p, self.prec)

    @classmethod
    def parse(cls, p, text):
        """Inverse of render()."""
        text = text.strip()
        body, _, otail = text.rpartition("+")
        otail = otail.strip()
        if not (otail.startswith("O(") and otail.endswith(")")):
            raise ValueError("malformed precision tail in %r" % text)
        base, _, expo = otail[2:-1].partition("^")
        if int(base) != p:
            raise PrimeMismatch("expected p=%d, text has %s" % (p, base))
        prec = int(expo)
        total = Fraction(0)
        body = body.strip()
        if body and body != "0":
            for term in body.split("+"):
                term = term.strip()
                if "*" in term:
                    dtxt, ptxt = term.split("*")
                    d = int(dtxt)
                else:
                    d, ptxt = 1, term
                ptxt = ptxt.strip()
                if "^" in ptxt:
                    b, e = ptxt.split("^")
                    val = Fraction(int(b)) ** int(e)
                elif int(ptxt) == p:
                    val = Fraction(p)
                else:
                    d, val = d * int(ptxt), Fraction(1)
                total += d * val
        return cls.from_rational(p, total, prec)

    def __repr__(self):
        return self.render()


def _is_prime(n):
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _sqrt_mod_p(a, p):
    """Tonelli-Shanks; None for non-residues."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def teichmuller(a):
    return a.teichmuller()


def hensel_sqrt(a, branch_digit=None):
    return a.sqrt(branch_digit)


def exact(p, x):
    """Embed an int/Fraction with effectively-exact relative precision."""
    if isinstance(x, PadicNumber):
        return x
    if isinstance(x, int):
        return PadicNumber.from_int(p, x, (padic_val(x, p) if x else 0) + _EXACT_PREC)
    if isinstance(x, Fraction):
        if x == 0:
            return PadicNumber.zero(p, _EXACT_PREC)
        v = padic_val(x.numerator, p) - padic_val(x.denominator, p)
        return PadicNumber.from_rational(p, x, v + _EXACT_PREC)
    raise TypeError("cannot coerce %r into Q_%d" % (x, p))


class PadicSeries:
    """Laurent series over Q_p with per-coefficient precision.

    coeffs[i] is the coefficient of var^(low+i); exponents >= trunc are
    unknown.  Exponents below `low` are exactly zero.
    """

    __slots__ = ("p", "var", "low", "coeffs", "trunc")

    def __init__(self, p, coeffs, low=0, var="t"):
        self.p = p
        self.var = var
        self.low = low
        self.coeffs = list(coeffs)
        self.trunc = low + len(self.coeffs)

    @classmethod
    def from_map(cls, p, mapping, trunc, var="t"):
        """Series from {exponent: coefficient}; gaps are exact zeros."""
        if not mapping:
            return cls(p, [], 0, var)
        low = min(mapping)
        zero = PadicNumber.zero(p, _EXACT_PREC)
        return cls(p, [mapping.get(i, zero) for i in range(low, trunc)], low, var)

    @classmethod
    def constant(cls, p, value, trunc, var="t"):
        zero = PadicNumber.zero(p, _EXACT_PREC)
        return cls(p, [exact(p, value)] + [zero] * (trunc - 1), 0, var)

    def coeff(self, i):
        """Coefficient of var^i; raises beyond the truncation order."""
        if i >= self.trunc:
            raise TruncationUnderflow(
                "coefficient of %s^%d beyond O(%s^%d)" % (self.var, i, self.var, self.trunc))
        if i < self.low:
            return PadicNumber.zero(self.p, _EXACT_PREC)
        return self.coeffs[i - self.low]

    def _check(self, other):
        if self.p != other.p:
            raise PrimeMismatch("series over different primes")
        if self.var != other.var:
            raise PadicError("series in different variables: %s vs %s" % (self.var, other.var))

    def __add__(self, other):
        if isinstance(other, (int, Fraction, PadicNumber)):
            other = PadicSeries.constant(self.p, other, self.trunc, self.var)
        self._check(other)
        trunc = min(self.trunc, other.trunc)
        low = min(self.low, other.low)
        if trunc <= low:
            raise TruncationUnderflow("empty sum window")
        return PadicSeries(self.p, [self.coeff(i) + other.coeff(i) for i in range(low, trunc)],
                           low, self.var)

    __radd__ = __add__

    def __neg__(self):
        return PadicSeries(self.p, [-c for c in self.coeffs], self.low, self.var)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, PadicNumber)):
            other = PadicSeries.constant(self.p, other, self.trunc, self.var)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = exact(self.p, c) if not isinstance(c, PadicNumber) else c
        return PadicSeries(self.p, [a * c for a in self.coeffs], self.low, self.var)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PadicNumber)):
            return self.scale(other)
        self._check(other)
        trunc = min(self.trunc + other.low, other.trunc + self.low)
        low = self.low + other.low
        n = trunc - low
        if n <= 0:
            raise TruncationUnderflow("empty product window")
        acc = [PadicNumber.zero(self.p, _EXACT_PREC) for _ in range(n)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero() and a.prec >= _EXACT_PREC:
                continue
            jmax = min(len(other.coeffs), n - i)
            for j in range(jmax):
                acc[i + j] = acc[i + j] + a * other.coeffs[j]
        return PadicSeries(self.p, acc, low, self.var)

    __rmul__ = __mul__

    def shift(self, k):
        """Multiply by var^k."""
        return PadicSeries(self.p, list(self.coeffs), self.low + k, self.var)

    def truncate(self, trunc):
        if trunc > self.trunc:
            raise TruncationUnderflow("cannot extend truncation")
        return PadicSeries(self.p, self.coeffs[:trunc - self.low], self.low, self.var)

    def derivative(self):
        return PadicSeries(self.p,
                           [self.coeff(i) * i for i in range(self.low, self.trunc)],
                           self.low - 1, self.var)

    def formal_integral(self):
        """Antiderivative with zero constant term.

        The coefficient of var^(i+1) is coeff(i)/(i+1) and loses exactly
        ord_p(i+1) digits of absolute precision.  A var^-1 coefficient must
        be zero at its precision (no logarithms here); it is dropped.
        """
        out = {}
        for i in range(self.low, self.trunc):
            c = self.coeff(i)
            if i == -1:
                if not c.is_zero():
                    raise PadicError("formal integral of a series with nonzero residue")
                continue
            out[i + 1] = c if i == 0 else c / exact(self.p, i + 1)
        zero = PadicNumber.zero(self.p, _EXACT_PREC)
        low = min(out) if out else 0
        trunc = self.trunc + 1
        return PadicSeries(self.p, [out.get(i, zero) for i in range(low, trunc)], low, self.var)

    def compose(self, inner):
        """self(inner(t)); inner must vanish at 0, self must be a power series."""
        self._check(inner)
        if self.low < 0:
            raise PadicError("cannot compose a Laurent series")
        if inner.low < 1:
            raise PadicError("inner series must vanish at 0")
        trunc = min(self.trunc * inner.low, inner.trunc)
        result = PadicSeries.constant(self.p, 0, trunc, self.var)
        power = PadicSeries.constant(self.p, 1, trunc, self.var)
        for i in range(0, self.trunc):
            if i * inner.low >= trunc:
                break
            if i >= self.low:
                result = result + power.scale(self.coeff(i))
            power = (power * inner).truncate(trunc) if (i + 1) * inner.low < trunc else power
        return result

    def invert_unit(self):
        """Multiplicative inverse; the lowest coefficient must be a unit."""
        c0 = self.coeff(self.low)
        if not c0.is_unit():
            raise NotAUnit("inversion needs a unit lowest coefficient")
        n = len(self.coeffs)
        inv0 = c0.inverse()
        out = [inv0]
        for k in range(1, n):
            s = PadicNumber.zero(self.p, _EXACT_PREC)
            for j in range(1, k + 1):
                s = s + self.coeff(self.low + j) * out[k - j]
            out.append(-inv0 * s)
        return PadicSeries(self.p, out, -self.low, self.var)

    def sqrt_unit(self, branch_digit=None):
        """Square root; lowest exponent even, lowest coefficient a unit square."""
        if self.low % 2:
            raise NotASquare("odd lowest exponent %d" % self.low)
        s0 = self.coeff(self.low).sqrt(branch_digit)
        n = len(self.coeffs)
        out = [s0]
        inv2s0 = (s0 + s0).inverse()
        for k in range(1, n):
            s = PadicNumber.zero(self.p, _EXACT_PREC)
            for j in range(1, k):
                s = s + out[j] * out[k - j]
            out.append((self.coeff(self.low + k) - s) * inv2s0)
        return PadicSeries(self.p, out, self.low // 2, self.var)

    def evaluate(self, t0, tail_margin=0):
        """Sum of the series at t0 with val(t0) >= 1.

        The unknown tail contributes O(p^(trunc*val(t0) + tail_margin)); pass
        a negative tail_margin when tail coefficients may have negative
        valuation (e.g. after formal integration).
        """
        t0 = t0 if isinstance(t0, PadicNumber) else exact(self.p, t0)
        if t0.is_zero():
            if self.low < 0:
                raise PadicError("Laurent series evaluated at the disk center")
            tail = self.trunc * max(t0.val, 1) + tail_margin
            return self.coeff(0).truncate(min(self.coeff(0).prec, tail)) if self.low <= 0 < self.trunc \
                else PadicNumber.zero(self.p, tail)
        if t0.val < 1:
            raise PadicError("evaluation point must be in the open unit disk")
        tail = self.trunc * t0.val + tail_margin
        total = PadicNumber.zero(self.p, _EXACT_PREC)
        power = t0 ** self.low if self.low >= 0 else t0.inverse() ** (-self.low)
        for i in range(self.low, self.trunc):
            total = total + self.coeffs[i - self.low] * power
            power = power * t0
        return total.truncate(min(total.prec, tail))

    def newton_polygon(self):
        return NewtonPolygon.of_series(self)

    def render(self):
        parts = []
        for i in range(self.low, self.trunc):
            c = self.coeff(i)
            if c.is_zero():
                continue
            parts.append("(%s)*%s^%d" % (c.render(), self.var, i))
        tail = "O(%s^%d)" % (self.var, self.trunc)
        return (" + ".join(parts) + " + " + tail) if parts else tail

    __repr__ = render


def _cross(a, b, c):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _lower_hull(pts):
    pts = sorted(pts)
    hull = []
    for q in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], q) <= 0:
            hull.pop()
        hull.append(q)
    return hull


def _hull_height(hull, x):
    """Height of the hull's piecewise-linear graph at abscissa x (in span)."""
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        if x0 <= x <= x1:
            return Fraction(y0) + Fraction(y1 - y0, x1 - x0) * (x - x0)
    return None


class NewtonPolygon:
    """Lower convex hull of the (exponent, valuation) points of a series.

    Only coefficients with exactly-known valuation contribute vertices.  A
    zero-at-precision coefficient whose precision bound dips strictly below
    the hull within its span makes the polygon itself uncertain and raises
    InsufficientPrecision.  (Certification outside the span is the job of
    polygon_roots, which knows the target precision.)
    """

    __slots__ = ("vertices", "slopes")

    def __init__(self, points, uncertain=()):
        if not points:
            raise InsufficientPrecision("no exactly-known coefficients; no polygon")
        hull = _lower_hull(points)
        for i, bound in uncertain:
            h = _hull_height(hull, i)
            if h is not None and Fraction(bound) < h:
                raise InsufficientPrecision(
                    "coefficient of exponent %d known only to O(p^%s), masking the polygon" % (i, bound))
        self.vertices = hull
        self.slopes = [(Fraction(y1 - y0, x1 - x0), x1 - x0)
                       for (x0, y0), (x1, y1) in zip(hull, hull[1:])]

    @classmethod
    def of_series(cls, s):
        pts, unknown = [], []
        for i in range(s.low, s.trunc):
            c = s.coeff(i)
            if c.is_zero():
                unknown.append((i, c.prec))
            else:
                pts.append((i, c.val))
        return cls(pts, unknown)

    def root_count_with_val_at_least(self, r):
        """Roots (with multiplicity) of valuation >= r in the closed disk.

        Segments of slope -m and horizontal length L carry L roots of
        valuation m; the first vertex's abscissa counts roots at t=0
        (valid when all lower coefficients are exactly zero).
        """
        n = self.vertices[0][0]
        for slope, length in self.slopes:
            if -slope >= r:
                n += length
        return n


def polygon_roots(series, disk_radius_val, target_prec=None):
    """All roots of the series with val(root) >= disk_radius_val.

    Returns [(root, multiplicity)] with roots as PadicNumber carrying the
    certified precision.  The series must converge on the disk; dropped tail
    coefficients c_i must satisfy val(c_i) + i*disk_radius_val >= the target
    precision, and the *stored* tail is checked against exactly that, so an
    undersized truncation order raises instead of silently lying.  Precision
    that cannot determine the polygon raises InsufficientPrecision, which the
    callers treat as "retry with more digits".
    """
    p, r = series.p, disk_radius_val
    if series.low < 0:
        raise PadicError("root finding expects a power series (clear poles first)")
    if target_prec is None:
        target_prec = max((c.prec for c in series.coeffs if not c.is_zero()), default=8)

    # rescale t = p^r s so the disk becomes val(s) >= 0, then clear any
    # global negative valuation (it does not move the roots)
    scaled = []
    for i in range(0, series.trunc):
        c = series.coeff(i)
        if c.is_zero():
            scaled.append(PadicNumber.zero(p, min(c.prec + i * r, i * r + _EXACT_PREC)))
        else:
            scaled.append(PadicNumber(p, c.val + i * r, c.unit, c.prec + i * r))
    lift_by = max(0, -min((c.val for c in scaled if not c.is_zero()), default=0))
    if lift_by:
        scaled = [PadicNumber(p, c.val + lift_by, c.unit, c.prec + lift_by) if not c.is_zero()
                  else PadicNumber.zero(p, c.prec + lift_by) for c in scaled]

    nz = [(i, c.val) for i, c in enumerate(scaled) if not c.is_zero()]
    work = target_prec
    head = [(i, v) for i, v in nz if v < work]
    if not head:
        raise InsufficientPrecision("series indistinguishable from 0 mod p^%d on the disk" % work)
    work = min([work] + [scaled[i].prec for i, v in head])
    if work <= 0:
        raise InsufficientPrecision("no usable digits for root finding")
    head = [(i, v) for i, v in nz if v < work]
    if not head:
        raise InsufficientPrecision("no coefficients below the working precision")
    expected = NewtonPolygon(nz).root_count_with_val_at_least(0)

    hull = _lower_hull(head)
    x_min = hull[0][0]
    for i, c in enumerate(scaled):
        if c.is_zero() or c.val >= work:
            bound = c.prec if c.is_zero() else c.val
            if i < x_min and bound < work:
                raise InsufficientPrecision(
                    "coefficient %d known to O(p^%d) only; disk-center root uncertain" % (i, bound))
            h = _hull_height(hull, i)
            if h is not None and bound < min(h, work):
                raise InsufficientPrecision("masked polygon vertex at exponent %d" % i)

    head_len = 1 + max(i for i, v in head)
    # roots at the disk center: multiplicity = number of leading vanishing
    # coefficients; their certified precision is limited by how well those
    # leading coefficients are pinned to zero
    m0 = x_min
    out = []
    if m0:
        y_min = hull[0][1]
        cert0 = work
        for i in range(m0):
            c = scaled[i]
            bound = c.prec if c.is_zero() else c.val
            cert0 = min(cert0, (bound - y_min) // (m0 - i))
        if cert0 < 1:
            raise InsufficientPrecision("cannot separate the disk-center root")
        out.append((PadicNumber.zero(p, cert0 + r), m0))
    cap = work + 8
    pairs = []
    for c in scaled[m0:head_len]:
        pr = min(c.prec, cap)
        pairs.append((0 if c.is_zero() else c.lift() % p ** pr, pr))
    for digits, mult, cert in _roots_mod_p_power(pairs, p, work):
        out.append((PadicNumber(p, r, digits, r + cert) if digits else PadicNumber.zero(p, r + cert),
                    mult))
    found = sum(m for _, m in out)
    if found != expected:
        raise InsufficientPrecision(
            "polygon predicts %d roots in the disk, refinement certified %d" % (expected, found))
    return out


def _poly_eval_mod(coeffs, x, mod):
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % mod
    return acc


def _shift_pairs(pairs, a, p):
    """Taylor shift P(X+a) on (coeff, prec) pairs.

    The shifted coefficient i mixes input coefficients j >= i, so its
    precision is the min over that range.
    """
    n = len(pairs)
    suffix_prec = [0] * n
    m = 10 ** 9
    for i in range(n - 1, -1, -1):
        m = min(m, pairs[i][1])
        suffix_prec[i] = m
    c = [v for v, _ in pairs]
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            c[j] = c[j] + a * c[j + 1]
    return [(c[i] % p ** suffix_prec[i] if suffix_prec[i] > 0 else 0, suffix_prec[i]) for i in range(n)]


def _local_root_count(pairs, p, min_val):
    """Polygon count of roots with val >= min_val from (coeff, prec) pairs.

    Coefficients whose value is pinned (val < prec) give exact points; an
    ambiguous leading coefficient raises.
    """
    pts, unknown = [], []
    for i, (c, prec) in enumerate(pairs):
        v = padic_val(c, p) if c % p ** prec else None
        if v is not None and v < prec:
            pts.append((i, v))
        else:
            unknown.append((i, prec))
    if not pts:
        raise InsufficientPrecision("cluster polynomial vanishes at available precision")
    hull = _lower_hull(pts)
    count = hull[0][0]
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        if Fraction(y0 - y1, x1 - x0) >= min_val:
            count += x1 - x0
    for i, bound in unknown:
        if i < hull[0][0] and bound < hull[0][1] + (hull[0][0] - i) * min_val:
            raise InsufficientPrecision("ambiguous cluster head")
        h = _hull_height(hull, i)
        if h is not None and bound < h:
            raise InsufficientPrecision("masked cluster polygon at exponent %d" % i)
    return count


def _roots_mod_p_power(pairs, p, n):
    """Roots in Z_p of a polynomial given as (coefficient, abs precision).

    Returns (digits, multiplicity, certified_digits), digit-by-digit: simple
    residues are finished by Hensel lifting; branches where the derivative
    degenerates are refined recursively and reported as a multiple root once
    the full digit depth n is reached with the local polygon still seeing the
    cluster.  Precision exhaustion raises InsufficientPrecision.
    """
    results = []

    def recurse(prs, depth, digits):
        minprec = min(pr for _, pr in prs)
        if minprec <= 0:
            raise InsufficientPrecision("ran out of digits while separating roots")
        content = min((padic_val(c, p) if c else pr) for c, pr in prs)
        if content >= minprec:
            raise InsufficientPrecision("cluster polynomial vanishes at available precision")
        red = [((c // p ** content) % p ** (pr - content), pr - content) for c, pr in prs]
        avail = min(pr for _, pr in red)
        dred = [(i * c, pr) for i, (c, pr) in enumerate(red)][1:]
        for d in range(p):
            if _poly_eval_mod([c for c, _ in red], d, p):
                continue
            if _poly_eval_mod([c for c, _ in dred], d, p):
                mod = p ** avail
                root = _hensel_refine([c % mod for c, _ in red], d, p, avail)
                cert = min(depth + avail, n)
                results.append(((digits + root * p ** depth) % p ** cert, 1, cert))
                continue
            shifted = _shift_pairs(red, d, p)
            deeper = _local_root_count(shifted, p, 1)
            if deeper == 0:
                continue
            if depth + 1 >= n:
                results.append(((digits + d * p ** depth) % p ** (depth + 1), deeper, depth + 1))
                continue
            rescaled = [(c * p ** i, pr + i) for i, (c, pr) in enumerate(shifted)]
            recurse(rescaled, depth + 1, digits + d * p ** depth)

    recurse(list(pairs), 0, 0)
    return sorted(results)


def _hensel_refine(poly, x0, p, n):
    mod = p ** n
    x = x0 % mod
    dpoly = [i * c % mod for i, c in enumerate(poly)][1:]
    for _ in range(n.bit_length() + 2):
        fx = _poly_eval_mod(poly, x, mod)
        if fx == 0:
            break
        x = (x - fx * pow(_poly_eval_mod(dpoly, x, mod), -1, mod)) % mod
    return x
