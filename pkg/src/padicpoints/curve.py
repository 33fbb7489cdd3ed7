"""Hyperelliptic models y^2 = f(x), their points, and residue disks.

Models are y^2 = f(x) with f monic, integral and squarefree, of degree
2g+1 or 2g+2.  Even-degree models carry two points at infinity inf+ and
inf-, distinguished by the sign of y/x^(g+1); odd-degree models have one
ramified point at infinity.

Points with val(x) < 0 (the infinity tubes) are handled by switching to
the reversed model y^2 = x^(2g+2) f(1/x); see CurveModel.flip.
"""

from fractions import Fraction

from .algebra import GFp, GFp2, Poly, QQ, Qp, poly_disc
from .errors import BadReduction, PadicError
from .padic import PadicNumber, PadicSeries, _sqrt_mod_p, exact

AFFINE = "affine"
INF_PLUS = "inf+"
INF_MINUS = "inf-"
INF_ODD = "inf"


class CurveModel:
    """y^2 = f(x) with integer monic squarefree f."""

    def __init__(self, f_coeffs, label=""):
        self.f = [int(c) for c in f_coeffs]
        if self.f[-1] != 1:
            raise ValueError("f must be monic")
        self.degree = len(self.f) - 1
        self.genus = (self.degree - 1) // 2
        self.label = label or "y^2=f(x) deg %d" % self.degree
        d = poly_disc(Poly.from_ints(QQ, self.f))
        if d == 0:
            raise ValueError("f must be squarefree")
        self.disc = d.numerator

    @property
    def even_degree(self):
        return self.degree % 2 == 0

    def f_poly(self, ring=QQ):
        return Poly.from_ints(ring, self.f)

    def f_eval(self, x):
        acc = None
        for c in reversed(self.f):
            acc = c if acc is None else acc * x + c
        return acc

    def good_reduction(self, p):
        return p != 2 and self.disc % p != 0

    def check_good_reduction(self, p):
        if p == 2:
            raise BadReduction("p = 2 is not supported")
        if self.disc % p == 0:
            raise BadReduction("disc(f) is divisible by %d" % p)

    def infinity_points(self):
        if self.even_degree:
            return [CurvePoint.infinity(+1), CurvePoint.infinity(-1)]
        return [CurvePoint.infinity(0)]

    def flip(self):
        """The model y^2 = x^(2g+2) f(1/x) covering the infinity tubes.

        Needs f(0) = 1 so the reversed polynomial stays monic; translate
        x first if your model has another constant term.
        """
        if self.degree % 2:
            raise PadicError("flip is defined for even-degree models")
        if self.f[0] != 1:
            raise PadicError("flip needs f(0) = 1 (got %d); translate x so the "
                             "constant term is 1" % self.f[0])
        return CurveModel(list(reversed(self.f)), label=self.label + "~")

    def flip_point(self, pt):
        """Image of a point under (x, y) -> (1/x, y/x^(g+1)) on the flip."""
        g = self.genus
        if pt.chart != AFFINE:
            # inf+ -> (0, 1), inf- -> (0, -1)
            return CurvePoint(AFFINE, Fraction(0), Fraction(pt.sign))
        if isinstance(pt.x, PadicNumber):
            if pt.x.is_zero():
                raise PadicError("x = 0 maps to infinity on the flip")
            xi = pt.x.inverse()
            return CurvePoint(AFFINE, xi, pt.y * xi ** (g + 1))
        x = Fraction(pt.x)
        if x == 0:
            return CurvePoint.infinity(+1 if Fraction(pt.y) > 0 else -1)
        return CurvePoint(AFFINE, 1 / x, Fraction(pt.y) / x ** (g + 1))

    def __repr__(self):
        return "CurveModel(%s)" % self.label


class CurvePoint:
    """A point in a fixed coordinate chart.

    chart "affine" carries x, y (rational, p-adic or prime-field); the
    infinity charts are sign-tagged on even-degree models.
    """

    __slots__ = ("chart", "x", "y", "sign")

    def __init__(self, chart, x=None, y=None, sign=0):
        self.chart = chart
        self.x = x
        self.y = y
        self.sign = sign

    @classmethod
    def infinity(cls, sign):
        chart = INF_ODD if sign == 0 else (INF_PLUS if sign > 0 else INF_MINUS)
        return cls(chart, sign=1 if sign > 0 else (-1 if sign < 0 else 0))

    @property
    def is_infinite(self):
        return self.chart != AFFINE

    def involution(self):
        """Hyperelliptic involution (x, y) -> (x, -y)."""
        if self.is_infinite:
            return self if self.chart == INF_ODD else CurvePoint.infinity(-self.sign)
        return CurvePoint(AFFINE, self.x, -self.y)

    def as_padic(self, p, prec):
        if self.is_infinite:
            return self
        x = self.x if isinstance(self.x, PadicNumber) else PadicNumber.from_rational(p, Fraction(self.x), prec)
        y = self.y if isinstance(self.y, PadicNumber) else PadicNumber.from_rational(p, Fraction(self.y), prec)
        return CurvePoint(AFFINE, x, y)

    def key(self):
        """Hashable identity for exact (rational / finite-field) points."""
        if self.is_infinite:
            return (self.chart,)
        if isinstance(self.x, PadicNumber):
            raise TypeError("p-adic points have no exact key")
        if hasattr(self.x, "residue"):
            return (self.chart, self.x.residue, self.y.residue)
        return (self.chart, Fraction(self.x), Fraction(self.y))

    def __repr__(self):
        if self.is_infinite:
            return self.chart
        return "(%s, %s)" % (self.x, self.y)


def reduce_point(C, pt, v):
    """Reduction of an exact rational point modulo a good prime v."""
    if pt.is_infinite:
        return pt
    x, y = Fraction(pt.x), Fraction(pt.y)
    if x.denominator % v == 0:
        if not C.even_degree:
            return CurvePoint.infinity(0)
        s = y / x ** (C.genus + 1)
        r = s.numerator * pow(s.denominator, -1, v) % v
        if r not in (1, v - 1):
            raise PadicError("point does not reduce to an infinity branch")
        return CurvePoint.infinity(+1 if r == 1 else -1)
    ring = GFp(v)
    xr = ring.from_int(x.numerator * pow(x.denominator % v, -1, v))
    yr = ring.from_int(y.numerator * pow(y.denominator % v, -1, v))
    return CurvePoint(AFFINE, xr, yr)


def points_over_gf(C, field):
    """All points of the reduced curve over F_v or F_{v^2}, by enumeration."""
    pts = []
    f = Poly(field, [field.from_int(c) for c in C.f])
    for x in field.elements():
        fx = f(x)
        if field.is_zero(fx):
            pts.append(CurvePoint(AFFINE, x, field.zero()))
        elif fx.is_square():
            y = _field_sqrt(field, fx)
            pts.append(CurvePoint(AFFINE, x, y))
            pts.append(CurvePoint(AFFINE, x, -y))
    pts.extend(C.infinity_points())
    return pts


def _field_sqrt(field, x):
    if isinstance(field, GFp):
        return x.sqrt()
    v = field.v
    if x.b == 0:
        r = _sqrt_mod_p(x.a, v)
        if r is not None:
            return field.from_int(r)
    # sqrt in F_{v^2} by solving (a+bs)^2 = x; fine at the sizes in play
    for cand in field.elements():
        if cand * cand == x:
            return cand
    raise ValueError("not a square in %s" % field.name)


def count_points(C, v, quadratic=False):
    """#X(F_v) or #X(F_{v^2}) by exhaustive x-loop plus residue tests."""
    C.check_good_reduction(v)
    inf = 2 if C.even_degree else 1
    if not quadratic:
        n = 0
        for x in range(v):
            fx = _eval_mod(C.f, x, v)
            if fx == 0:
                n += 1
            elif pow(fx, (v - 1) // 2, v) == 1:
                n += 2
        return n + inf
    field = GFp2(v)
    f = Poly(field, [field.from_int(c) for c in C.f])
    n = 0
    for x in field.elements():
        fx = f(x)
        if field.is_zero(fx):
            n += 1
        elif fx.is_square():
            n += 2
    return n + inf


def _eval_mod(coeffs, x, v):
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % v
    return acc


def reduce_mod(C, v):
    """Reduced model over F_v together with the full point list X(F_v)."""
    C.check_good_reduction(v)
    field = GFp(v)
    fbar = Poly(field, [field.from_int(c) for c in C.f])
    return fbar, points_over_gf(C, field)


class ResidueDisk:
    """Points of X(Q_p) reducing to one point of X(F_p).

    center is a Teichmuller point (phi-fixed for phi(x) = x^p) on ordinary
    disks, the Weierstrass point itself on y = 0 disks, and the infinity
    point on infinity disks.  uniformizer: "x-x0" ordinary, "y"
    Weierstrass, "1/x" at even-degree infinity, "x^g/y" at odd infinity.
    """

    __slots__ = ("p", "reduction", "chart", "center", "uniformizer", "weierstrass")

    def __init__(self, p, reduction, chart, center, uniformizer, weierstrass):
        self.p = p
        self.reduction = reduction
        self.chart = chart
        self.center = center
        self.uniformizer = uniformizer
        self.weierstrass = weierstrass

    @property
    def is_infinite(self):
        return self.chart != AFFINE

    def label(self):
        return self.chart if self.is_infinite else "(%d,%d)" % self.reduction

    def __repr__(self):
        return "]%s[" % self.label()


def disks(C, p, prec):
    """One residue disk per point of X(F_p), with Teichmuller centers."""
    C.check_good_reduction(p)
    ring = Qp(p, prec)
    out = []
    for xbar in range(p):
        fx = _eval_mod(C.f, xbar, p)
        if fx == 0:
            r = _hensel_root(C.f, xbar, p, prec)
            center = CurvePoint(AFFINE, PadicNumber.from_int(p, r, prec), PadicNumber.zero(p, prec))
            out.append(ResidueDisk(p, (xbar, 0), AFFINE, center, "y", True))
            continue
        if pow(fx, (p - 1) // 2, p) != 1:
            continue
        x0 = ring.from_int(xbar).teichmuller() if xbar else PadicNumber.from_int(p, 0, prec)
        y2 = C.f_eval(x0) + PadicNumber.zero(p, prec)
        ybar = _sqrt_mod_p(fx, p)
        for s in (ybar, p - ybar):
            y0 = y2.sqrt(branch_digit=s)
            out.append(ResidueDisk(p, (xbar, s), AFFINE, CurvePoint(AFFINE, x0, y0), "x-x0", False))
    if C.even_degree:
        out.append(ResidueDisk(p, None, INF_PLUS, CurvePoint.infinity(+1), "1/x", False))
        out.append(ResidueDisk(p, None, INF_MINUS, CurvePoint.infinity(-1), "1/x", False))
    else:
        out.append(ResidueDisk(p, None, INF_ODD, CurvePoint.infinity(0), "x^g/y", True))
    return out


def _hensel_root(coeffs, x0, p, prec):
    """Simple root of an integer polynomial near x0 mod p."""
    mod = p ** prec
    x = x0 % mod
    dcoeffs = [i * c for i, c in enumerate(coeffs)][1:]
    for _ in range(prec.bit_length() + 2):
        fx = _eval_mod(coeffs, x, mod)
        if fx == 0:
            break
        x = (x - fx * pow(_eval_mod(dcoeffs, x, mod), -1, mod)) % mod
    return x


def disk_of(C, p, pt, all_disks):
    """The residue disk containing a point (p-adic or exact rational)."""
    def find_chart(chart):
        for D in all_disks:
            if D.chart == chart:
                return D
        raise PadicError("no disk of chart %s" % chart)

    if pt.is_infinite:
        return find_chart(pt.chart)
    if isinstance(pt.x, PadicNumber):
        if pt.x.val < 0:
            if not C.even_degree:
                return find_chart(INF_ODD)
            lead = (pt.y * pt.x.inverse() ** (C.genus + 1)).digit(0)
            return find_chart(INF_PLUS if lead == 1 else INF_MINUS)
        xbar = pt.x.digit(0)
        ybar = 0 if pt.y.is_zero() or pt.y.val > 0 else pt.y.digit(0)
    else:
        red = reduce_point(C, pt, p)
        if red.is_infinite:
            return find_chart(red.chart)
        xbar, ybar = red.x.residue, red.y.residue
    for D in all_disks:
        if D.chart == AFFINE and D.reduction == (xbar, ybar):
            return D
    raise PadicError("no disk for reduction (%s, %s)" % (xbar, ybar))


def poly_on_series(coeffs, s, p):
    """P(s(t)) for a coefficient list over int/Fraction/PadicNumber.

    s must be a power series (low >= 0); the window stays at s.trunc.
    """
    trunc = s.trunc
    acc = PadicSeries.constant(p, 0, trunc)
    for c in reversed(list(coeffs)):
        acc = acc * s if acc.trunc > 0 else acc
        acc = acc.truncate(min(acc.trunc, trunc))
        cval = c if isinstance(c, PadicNumber) else exact(p, Fraction(c) if not isinstance(c, int) else c)
        acc = acc + PadicSeries.constant(p, cval, acc.trunc)
    return acc


def x_series(C, D, trunc):
    """(x(t), y(t)) on an affine disk as series in its uniformizer.

    Ordinary disk: x = x0 + t, y = sqrt(f(x0+t)) on the branch of y0.
    Weierstrass disk: t = y, x(t) solves f(x) = t^2 with x(0) = x0.
    """
    p = D.p
    if D.chart != AFFINE:
        raise PadicError("x_series lives on affine disks; use expand_differential at infinity")
    if not D.weierstrass:
        x0 = D.center.x
        xf = PadicSeries.from_map(p, {0: x0 + PadicNumber.zero(p, x0.prec), 1: exact(p, 1)}, trunc)
        fser = poly_on_series(C.f, xf, p)
        yf = fser.sqrt_unit(branch_digit=D.center.y.digit(0))
        return xf, yf
    # Weierstrass: Newton-solve F(u) = t^2 where F(u) = f(x0 + u)
    x0 = D.center.x
    taylor = _taylor_coeffs(C.f, x0, p)
    t2 = PadicSeries.from_map(p, {2: exact(p, 1)}, trunc)
    u = PadicSeries.from_map(p, {2: taylor[1].inverse()}, trunc)
    dtaylor = [taylor[i] * i for i in range(1, len(taylor))]
    for _ in range(max(1, trunc.bit_length() + 1)):
        Fu = _list_on_series(taylor, u, p, trunc)
        dFu = _list_on_series(dtaylor, u, p, trunc)
        u = u - (Fu - t2) * dFu.invert_unit()
        u = u.truncate(min(u.trunc, trunc))
    xf = u + PadicSeries.constant(p, x0, trunc)
    yf = PadicSeries.from_map(p, {1: exact(p, 1)}, trunc)
    return xf, yf


def _list_on_series(coeffs, s, p, trunc):
    acc = PadicSeries.constant(p, 0, trunc)
    for c in reversed(coeffs):
        acc = acc * s
        acc = acc.truncate(min(acc.trunc, trunc))
        acc = acc + PadicSeries.constant(p, c, acc.trunc)
    return acc


def _taylor_coeffs(coeffs, x0, p):
    """Coefficients of f(x0 + u) in u, i.e. f^(k)(x0)/k!."""
    cur = [exact(p, c) for c in coeffs]
    out = []
    k = 0
    while cur:
        acc = PadicNumber.zero(p, 64)
        for c in reversed(cur):
            acc = acc * x0 + c
        out.append(acc)
        k += 1
        cur = [cur[i] * i / exact(p, k) for i in range(1, len(cur))]
    return out


def infinity_unit_series(C, D, trunc):
    """u(t) with y = sign * t^-(g+1) * u(t) at an even-degree infinity disk."""
    p = D.p
    rev = list(reversed(C.f))
    ser = PadicSeries.from_map(p, {i: exact(p, c) for i, c in enumerate(rev)}, trunc) \
        if trunc >= len(rev) else None
    if ser is None:
        raise PadicError("truncation too small for the infinity expansion")
    return ser.sqrt_unit(branch_digit=1)


def expand_differential(C, D, numer, trunc):
    """Series w(t) with numer(x) dx / y = w(t) dt on the disk.

    numer is a Poly over QQ or a plain coefficient list.  Laurent output at
    infinity disks, where the pole order is read off deg f.
    """
    p = D.p
    ncoeffs = list(numer.coeffs) if isinstance(numer, Poly) else list(numer)
    g = C.genus
    if D.chart == AFFINE and not D.weierstrass:
        xf, yf = x_series(C, D, trunc)
        return poly_on_series(ncoeffs, xf, p) * yf.invert_unit()
    if D.chart == AFFINE:
        # t = y: dx = 2t/f'(x(t)) dt, so numer dx/y = 2 numer(x(t))/f'(x(t)) dt
        xf, _ = x_series(C, D, trunc)
        num = poly_on_series(ncoeffs, xf, p)
        dfv = poly_on_series([i * c for i, c in enumerate(C.f)][1:], xf, p)
        return num.scale(2) * dfv.invert_unit()
    if not C.even_degree:
        raise PadicError("expand at odd-degree infinity via the x^g/y chart is not needed; flip instead")
    # t = 1/x: dx = -dt/t^2, 1/y = sign * t^(g+1) / u(t)
    sign = 1 if D.chart == INF_PLUS else -1
    u = infinity_unit_series(C, D, trunc + 2 * g + 4)
    inv_u = u.invert_unit()
    mapping = {-i: exact(p, Fraction(c) if not isinstance(c, (int, PadicNumber)) else c)
               for i, c in enumerate(ncoeffs)}
    num = PadicSeries.from_map(p, mapping, trunc) if mapping else PadicSeries.constant(p, 0, trunc)
    return -(num * inv_u).shift(g - 1).scale(sign)
