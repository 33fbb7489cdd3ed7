"""Polynomials and dense matrices over Q, Q_p and prime fields.

Everything is generic over a small ring adapter so the same elimination and
characteristic-polynomial code runs over exact rationals (Fraction), capped
precision Q_p (PadicNumber) and F_v / F_{v^2}.  Matrices act on column
vectors throughout.
"""

from fractions import Fraction

from .errors import NotASquare, RingMismatch, SingularAtPrecision
from .padic import PadicNumber, _sqrt_mod_p, padic_val


class QQ:
    """Ring adapter for exact rationals."""

    name = "QQ"

    @staticmethod
    def zero():
        return Fraction(0)

    @staticmethod
    def one():
        return Fraction(1)

    @staticmethod
    def from_int(n):
        return Fraction(n)

    @staticmethod
    def is_zero(x):
        return x == 0

    @staticmethod
    def inv(x):
        return 1 / Fraction(x)

    @staticmethod
    def pivot_size(x):
        # any nonzero rational is a perfect pivot
        return 0 if x != 0 else None

    def __repr__(self):
        return "QQ"


class Qp:
    """Ring adapter for capped-precision Q_p at a working precision."""

    def __init__(self, p, prec):
        self.p = p
        self.prec = prec
        self.name = "Q_%d" % p

    def zero(self):
        return PadicNumber.zero(self.p, self.prec)

    def one(self):
        return PadicNumber.from_int(self.p, 1, self.prec)

    def from_int(self, n):
        return PadicNumber.from_int(self.p, n, self.prec)

    def from_rational(self, q):
        return PadicNumber.from_rational(self.p, q, self.prec)

    @staticmethod
    def is_zero(x):
        return x.is_zero()

    @staticmethod
    def inv(x):
        return x.inverse()

    @staticmethod
    def pivot_size(x):
        return x.val if not x.is_zero() else None

    def __repr__(self):
        return "Q_%d[O(%d^%d)]" % (self.p, self.p, self.prec)


class GFp:
    """Prime field F_v with plain int residues."""

    def __init__(self, v):
        self.v = v
        self.name = "GF(%d)" % v

    def zero(self):
        return PrimeFieldElem(self.v, 0)

    def one(self):
        return PrimeFieldElem(self.v, 1)

    def from_int(self, n):
        return PrimeFieldElem(self.v, n)

    @staticmethod
    def is_zero(x):
        return x.residue == 0

    @staticmethod
    def inv(x):
        return x.inverse()

    @staticmethod
    def pivot_size(x):
        return 0 if x.residue else None

    def elements(self):
        for r in range(self.v):
            yield PrimeFieldElem(self.v, r)

    def __repr__(self):
        return self.name


class PrimeFieldElem:
    """Element of F_v."""

    __slots__ = ("v", "residue")

    def __init__(self, v, residue):
        self.v = v
        self.residue = residue % v

    def _coerce(self, other):
        if isinstance(other, PrimeFieldElem):
            if other.v != self.v:
                raise RingMismatch("F_%d vs F_%d" % (self.v, other.v))
            return other
        if isinstance(other, int):
            return PrimeFieldElem(self.v, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return PrimeFieldElem(self.v, self.residue + other.residue)

    __radd__ = __add__

    def __neg__(self):
        return PrimeFieldElem(self.v, -self.residue)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return PrimeFieldElem(self.v, self.residue - other.residue)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return PrimeFieldElem(self.v, self.residue * other.residue)

    __rmul__ = __mul__

    def inverse(self):
        if self.residue == 0:
            raise ZeroDivisionError("inverse of 0 in F_%d" % self.v)
        return PrimeFieldElem(self.v, pow(self.residue, -1, self.v))

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def __pow__(self, n):
        return PrimeFieldElem(self.v, pow(self.residue, n % (self.v - 1) if self.residue else n, self.v))

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.residue == other.residue

    def __hash__(self):
        return hash((self.v, self.residue))

    def is_square(self):
        return self.residue == 0 or pow(self.residue, (self.v - 1) // 2, self.v) == 1

    def sqrt(self):
        r = _sqrt_mod_p(self.residue, self.v)
        if r is None:
            raise NotASquare("%d is not a square mod %d" % (self.residue, self.v))
        return PrimeFieldElem(self.v, r)

    def __repr__(self):
        return "%d" % self.residue


class GFp2:
    """F_{v^2} as F_v[s]/(s^2 - nonresidue), for point counts over F_{v^2}."""

    def __init__(self, v):
        self.v = v
        d = 2
        while pow(d, (v - 1) // 2, v) == 1:
            d += 1
        self.nonres = d
        self.name = "GF(%d^2)" % v

    def zero(self):
        return QuadFieldElem(self, 0, 0)

    def one(self):
        return QuadFieldElem(self, 1, 0)

    def from_int(self, n):
        return QuadFieldElem(self, n, 0)

    @staticmethod
    def is_zero(x):
        return x.a == 0 and x.b == 0

    @staticmethod
    def inv(x):
        return x.inverse()

    @staticmethod
    def pivot_size(x):
        return 0 if (x.a or x.b) else None

    def elements(self):
        for a in range(self.v):
            for b in range(self.v):
                yield QuadFieldElem(self, a, b)

    def __repr__(self):
        return self.name


class QuadFieldElem:
    """a + b*s with s^2 = nonresidue, over F_v."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field, a, b):
        self.field = field
        self.a = a % field.v
        self.b = b % field.v

    def _coerce(self, other):
        if isinstance(other, QuadFieldElem):
            return other
        if isinstance(other, int):
            return QuadFieldElem(self.field, other, 0)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        return QuadFieldElem(self.field, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadFieldElem(self.field, -self.a, -self.b)

    def __sub__(self, other):
        other = self._coerce(other)
        return self + (-other)

    def __mul__(self, other):
        other = self._coerce(other)
        v, d = self.field.v, self.field.nonres
        return QuadFieldElem(self.field,
                             self.a * other.a + d * self.b * other.b,
                             self.a * other.b + self.b * other.a)

    __rmul__ = __mul__

    def inverse(self):
        v, d = self.field.v, self.field.nonres
        nrm = (self.a * self.a - d * self.b * self.b) % v
        inv = pow(nrm, -1, v)
        return QuadFieldElem(self.field, self.a * inv, -self.b * inv)

    def __pow__(self, n):
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.field.v, self.a, self.b))

    def is_square(self):
        if self.a == 0 and self.b == 0:
            return True
        v = self.field.v
        return self ** ((v * v - 1) // 2) == self.field.one()

    def __repr__(self):
        return "%d + %d*s" % (self.a, self.b)


class Poly:
    """Dense univariate polynomial over a ring adapter."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs):
        self.ring = ring
        cs = list(coeffs)
        while cs and ring.is_zero(cs[-1]):
            cs.pop()
        self.coeffs = cs

    @classmethod
    def from_ints(cls, ring, ints):
        return cls(ring, [ring.from_int(n) for n in ints])

    @classmethod
    def x(cls, ring):
        return cls(ring, [ring.zero(), ring.one()])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def coeff(self, i):
        return self.coeffs[i] if 0 <= i <= self.degree else self.ring.zero()

    def leading(self):
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def _check(self, other):
        if not isinstance(other, Poly):
            other = Poly(self.ring, [other if not isinstance(other, int) else self.ring.from_int(other)])
        elif self.ring.name != other.ring.name:
            raise RingMismatch("%s vs %s" % (self.ring.name, other.ring.name))
        return other

    def __add__(self, other):
        other = self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.ring, [self.coeff(i) + other.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, [-c for c in self.coeffs])

    def __sub__(self, other):
        other = self._check(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            other = self._check(other)
        else:
            other = self._check(other)
        if self.is_zero() or other.is_zero():
            return Poly(self.ring, [])
        out = [self.ring.zero() for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        for i, a in enumerate(self.coeffs):
            if self.ring.is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(self.ring, out)

    __rmul__ = __mul__


    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative polynomial power")
        result = Poly(self.ring, [self.ring.one()])
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c):
        return Poly(self.ring, [a * c for a in self.coeffs])

    def shift(self, k):
        """Multiply by x^k."""
        return Poly(self.ring, [self.ring.zero()] * k + self.coeffs)

    def divmod(self, other):
        other = self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(self.ring, []), self
        q = [self.ring.zero()] * (dq + 1)
        inv_lead = self.ring.inv(other.leading())
        for k in range(dq, -1, -1):
            c = rem[k + other.degree] * inv_lead
            q[k] = c
            if not self.ring.is_zero(c):
                for j, b in enumerate(other.coeffs):
                    rem[k + j] = rem[k + j] - c * b
        return Poly(self.ring, q), Poly(self.ring, rem[:other.degree])

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def monic(self):
        if self.is_zero():
            return self
        return self.scale(self.ring.inv(self.leading()))

    def derivative(self):
        return Poly(self.ring, [c * (i + 1) for i, c in enumerate(self.coeffs[1:])])

    def __call__(self, x):
        acc = self.ring.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, other):
        acc = Poly(self.ring, [])
        for c in reversed(self.coeffs):
            acc = acc * other + Poly(self.ring, [c])
        return acc

    def reverse(self, degree=None):
        """x^degree * f(1/x); degree defaults to deg f."""
        d = self.degree if degree is None else degree
        out = [self.ring.zero()] * (d + 1)
        for i, c in enumerate(self.coeffs):
            out[d - i] = c
        return Poly(self.ring, out)

    def map_coeffs(self, fn, ring=None):
        return Poly(ring or self.ring, [fn(c) for c in self.coeffs])

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        if self.is_zero():
            return "0"
        return " + ".join("(%s)*x^%d" % (c, i) for i, c in enumerate(self.coeffs)
                          if not self.ring.is_zero(c))


def poly_gcd(a, b):
    """Monic gcd by the Euclidean algorithm (field coefficients)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def poly_xgcd(a, b):
    """(g, u, v) with u*a + v*b = g, g monic."""
    ring = a.ring
    r0, r1 = a, b
    s0, s1 = Poly(ring, [ring.one()]), Poly(ring, [])
    t0, t1 = Poly(ring, []), Poly(ring, [ring.one()])
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    c = ring.inv(r0.leading())
    return r0.scale(c), s0.scale(c), t0.scale(c)


def poly_resultant(a, b):
    """Resultant via the Euclidean remainder sequence (exact fields)."""
    ring = a.ring
    if a.is_zero() or b.is_zero():
        return ring.zero()
    res = ring.one()
    while True:
        if b.degree == 0:
            return res * b.coeffs[0] ** a.degree if a.degree >= 0 else res
        r = a % b
        if r.is_zero():
            return ring.zero()
        res = res * b.leading() ** (a.degree - r.degree)
        if (a.degree * b.degree) % 2:
            res = -res
        a, b = b, r


def poly_disc(f):
    """Discriminant of f over its (field) ring."""
    ring = f.ring
    n = f.degree
    res = poly_resultant(f, f.derivative())
    sign = ring.from_int(-1) if (n * (n - 1) // 2) % 2 else ring.one()
    return sign * res * ring.inv(f.leading())


class Matrix:
    """Dense matrix over a ring adapter; acts on column vectors."""

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring, entries):
        self.ring = ring
        self.entries = [list(r) for r in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        if any(len(r) != self.cols for r in self.entries):
            raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, ring, n):
        return cls(ring, [[ring.one() if i == j else ring.zero() for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, ring, rows, cols):
        return cls(ring, [[ring.zero() for _ in range(cols)] for _ in range(rows)])

    @classmethod
    def from_ints(cls, ring, rows):
        return cls(ring, [[ring.from_int(x) for x in r] for r in rows])

    @classmethod
    def column(cls, ring, vec):
        return cls(ring, [[x] for x in vec])

    def __getitem__(self, ij):
        return self.entries[ij[0]][ij[1]]

    def row(self, i):
        return list(self.entries[i])

    def col(self, j):
        return [self.entries[i][j] for i in range(self.rows)]

    def __add__(self, other):
        return Matrix(self.ring, [[a + b for a, b in zip(ra, rb)]
                                  for ra, rb in zip(self.entries, other.entries)])

    def __sub__(self, other):
        return Matrix(self.ring, [[a - b for a, b in zip(ra, rb)]
                                  for ra, rb in zip(self.entries, other.entries)])

    def __neg__(self):
        return Matrix(self.ring, [[-a for a in r] for r in self.entries])

    def scale(self, c):
        return Matrix(self.ring, [[a * c for a in r] for r in self.entries])

    def __mul__(self, other):
        if not isinstance(other, Matrix):
            return self.scale(other)
        if self.cols != other.rows:
            raise ValueError("dimension mismatch %dx%d * %dx%d" % (self.rows, self.cols, other.rows, other.cols))
        z = self.ring.zero()
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = z
                for k in range(self.cols):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return Matrix(self.ring, out)

    __rmul__ = scale

    def transpose(self):
        return Matrix(self.ring, [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def apply(self, vec):
        """Matrix times a plain-list column vector."""
        return [sum_ring(self.ring, (self.entries[i][k] * vec[k] for k in range(self.cols)))
                for i in range(self.rows)]

    def map_entries(self, fn, ring=None):
        return Matrix(ring or self.ring, [[fn(a) for a in r] for r in self.entries])

    def trace(self):
        return sum_ring(self.ring, (self.entries[i][i] for i in range(self.rows)))

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.rows != other.rows or self.cols != other.cols:
            return False
        return all(self.ring.is_zero(a - b)
                   for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb))

    __hash__ = None

    def __repr__(self):
        return "\n".join("[" + "  ".join(str(a) for a in r) + "]" for r in self.entries)


def sum_ring(ring, it):
    acc = ring.zero()
    for x in it:
        acc = acc + x
    return acc


def mat_solve(A, b):
    """Solve A x = b with valuation-minimal pivoting.

    Returns (x, loss) where loss is the sum of pivot valuations encountered
    (0 over exact fields).  Raises SingularAtPrecision when no usable pivot
    remains.
    """
    ring = A.ring
    n = A.rows
    if A.cols != n:
        raise ValueError("mat_solve needs a square matrix")
    aug = [A.row(i) + b.row(i) for i in range(n)]
    width = n + b.cols
    loss = 0
    for col in range(n):
        best, best_size = None, None
        for r in range(col, n):
            size = ring.pivot_size(aug[r][col])
            if size is not None and (best_size is None or size < best_size):
                best, best_size = r, size
        if best is None:
            raise SingularAtPrecision("no pivot in column %d" % col)
        loss += best_size
        aug[col], aug[best] = aug[best], aug[col]
        inv = ring.inv(aug[col][col])
        aug[col] = [a * inv for a in aug[col]]
        for r in range(n):
            if r == col:
                continue
            f = aug[r][col]
            if ring.is_zero(f):
                continue
            aug[r] = [a - f * c for a, c in zip(aug[r], aug[col])]
    x = Matrix(ring, [row[n:] for row in aug])
    return x, loss


def mat_inverse(A):
    x, _ = mat_solve(A, Matrix.identity(A.ring, A.rows))
    return x


def mat_det(A):
    """Determinant by elimination (field coefficients)."""
    ring = A.ring
    n = A.rows
    m = [A.row(i) for i in range(n)]
    det = ring.one()
    for col in range(n):
        piv = None
        best = None
        for r in range(col, n):
            size = ring.pivot_size(m[r][col])
            if size is not None and (best is None or size < best):
                piv, best = r, size
        if piv is None:
            return ring.zero()
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det = det * m[col][col]
        inv = ring.inv(m[col][col])
        for r in range(col + 1, n):
            f = m[r][col] * inv
            if ring.is_zero(f):
                continue
            m[r] = [a - f * c for a, c in zip(m[r], m[col])]
    return det


def mat_kernel(A):
    """Basis of the right kernel, echelonized with unit pivots.

    Basis vectors carry the identity pattern on the non-pivot columns, in
    column order; suited to reproducible annihilator output.
    """
    ring = A.ring
    rows = [A.row(i) for i in range(A.rows)]
    n, m = A.rows, A.cols
    pivots = []
    r = 0
    for col in range(m):
        piv, best = None, None
        for i in range(r, n):
            size = ring.pivot_size(rows[i][col])
            if size is not None and (best is None or size < best):
                piv, best = i, size
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = ring.inv(rows[r][col])
        rows[r] = [a * inv for a in rows[r]]
        for i in range(n):
            if i != r and not ring.is_zero(rows[i][col]):
                f = rows[i][col]
                rows[i] = [a - f * c for a, c in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == n:
            break
    free = [j for j in range(m) if j not in pivots]
    basis = []
    for j in free:
        vec = [ring.zero()] * m
        vec[j] = ring.one()
        for i, pc in enumerate(pivots):
            vec[pc] = -rows[i][j]
        basis.append(vec)
    return basis, pivots


def charpoly(A):
    """Monic characteristic polynomial det(T*I - A) by Berkowitz.

    Division-free, so no pivoting and no artificial precision loss over Q_p.
    """
    ring = A.ring
    n = A.rows
    if n != A.cols:
        raise ValueError("charpoly needs a square matrix")
    if n == 0:
        return Poly(ring, [ring.one()])
    # Berkowitz: iteratively combine Toeplitz matrices built from principal
    # minors; vect holds the coefficients of the charpoly of the leading
    # r x r block, highest degree first, with sign convention det(TI - A)
    vect = [ring.one(), -A[0, 0]]
    for r in range(1, n):
        row = [A[r, j] for j in range(r)]
        colv = [A[i, r] for i in range(r)]
        sub = [[A[i, j] for j in range(r)] for i in range(r)]
        # c_k = -R * M^(k-2) * C for k = 2..r+1
        c = [None] * (r + 2)
        c[0] = ring.one()
        c[1] = -A[r, r]
        cur = colv
        for k in range(2, r + 2):
            c[k] = -sum_ring(ring, (row[i] * cur[i] for i in range(r)))
            if k < r + 1:
                cur = [sum_ring(ring, (sub[i][j] * cur[j] for j in range(r))) for i in range(r)]
        new = [ring.zero()] * (len(vect) + 1)
        for i, a in enumerate(vect):
            if ring.is_zero(a):
                continue
            for k, ck in enumerate(c):
                if i + k < len(new) and ck is not None:
                    new[i + k] = new[i + k] + a * ck
        vect = new
    # vect is highest-first; return lowest-first Poly in T
    return Poly(ring, list(reversed(vect)))
