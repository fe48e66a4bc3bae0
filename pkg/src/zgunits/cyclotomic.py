"""Exact arithmetic in cyclotomic fields Q(zeta_n).

Values are kept in the canonical power basis zeta_n^0 .. zeta_n^(phi(n)-1)
obtained by reducing modulo the n-th cyclotomic polynomial.  Two values are
equal iff their canonical coefficients agree after lifting both to the least
common conductor.  Everything is a Fraction; no floating point.
"""

from fractions import Fraction
from functools import lru_cache
from math import gcd

from .errors import CyclotomicFormatError, UnsupportedInputError
from .numtheory import euler_phi, is_prime_power, lcm, legendre, moebius

Rational = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


# ---------------------------------------------------------------------------
# integer polynomial helpers (dense, ascending-degree coefficient lists)

def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _poly_divexact(num, den):
    """Exact division of integer polynomials (den monic up to sign)."""
    num = list(num)
    lead = den[-1]
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        q, r = divmod(num[i + len(den) - 1], lead)
        if r:
            raise ArithmeticError("non-exact polynomial division")
        out[i] = q
        for j, dj in enumerate(den):
            num[i + j] -= q * dj
    if any(num):
        raise ArithmeticError("non-exact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n):
    """Coefficients of the n-th cyclotomic polynomial, ascending degree."""
    if n < 1:
        raise ValueError("conductor must be positive")
    if n == 1:
        return (-1, 1)
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _poly_divexact(num, cyclotomic_polynomial(d))
    return tuple(num)


@lru_cache(maxsize=None)
def _reduction_rows(n):
    """For each exponent e in [phi(n), n): the canonical coefficients of x^e
    modulo the n-th cyclotomic polynomial, as a tuple of integers."""
    phi = euler_phi(n)
    poly = cyclotomic_polynomial(n)
    rows = []
    if phi < n:
        top = tuple(-c for c in poly[:phi])
        rows.append(top)
        for _ in range(phi + 1, n):
            prev = rows[-1]
            shifted = [0] + list(prev[: phi - 1])
            carry = prev[phi - 1]
            if carry:
                shifted = [s + carry * t for s, t in zip(shifted, top)]
            rows.append(tuple(shifted))
    return phi, tuple(rows)


class CyclotomicNumber:
    """An exact element of Q(zeta_n), canonical within its conductor."""

    __slots__ = ("conductor", "coeffs")
    __hash__ = None

    def __init__(self, conductor, coeffs):
        phi, rows = _reduction_rows(conductor)
        canon = {}
        for e, c in coeffs.items():
            c = Fraction(c)
            if not c:
                continue
            e %= conductor
            if e < phi:
                canon[e] = canon.get(e, _ZERO) + c
            else:
                for i, r in enumerate(rows[e - phi]):
                    if r:
                        canon[i] = canon.get(i, _ZERO) + c * r
        cleaned = {e: c for e, c in canon.items() if c}
        # the conductor is sticky otherwise (lifts persist until an
        # explicit compress), but zero is shared across all fields
        if not cleaned:
            conductor = 1
        object.__setattr__(self, "conductor", conductor)
        object.__setattr__(self, "coeffs", cleaned)

    def __setattr__(self, name, value):
        raise AttributeError("CyclotomicNumber is immutable")

    # -- queries ---------------------------------------------------------

    def is_zero(self):
        return not self.coeffs

    def is_rational(self):
        return all(e == 0 for e in self.coeffs)

    def as_rational(self):
        if not self.is_rational():
            raise ValueError("value is irrational: %r" % (self,))
        return self.coeffs.get(0, _ZERO)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = from_rational(other)
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        return cyc_equal(self, other)

    def __repr__(self):
        if not self.coeffs:
            return "Cyc(%d; 0)" % self.conductor
        parts = []
        for e in sorted(self.coeffs):
            c = self.coeffs[e]
            parts.append("%s*z%d^%d" % (c, self.conductor, e)
                         if e else str(c))
        return "Cyc(%d; %s)" % (self.conductor, " + ".join(parts))

    # operator sugar used throughout the package

    def __add__(self, other):
        return cyc_add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return cyc_add(self, cyc_neg(_coerce(other)))

    def __rsub__(self, other):
        return cyc_add(_coerce(other), cyc_neg(self))

    def __mul__(self, other):
        return cyc_mul(self, _coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return cyc_neg(self)


def _coerce(x):
    if isinstance(x, CyclotomicNumber):
        return x
    if isinstance(x, (int, Fraction)):
        return from_rational(x)
    raise TypeError("cannot coerce %r to a cyclotomic number" % (x,))


def from_rational(r):
    return CyclotomicNumber(1, {0: Fraction(r)})


def zeta(n, a=1):
    """The root of unity zeta_n^a."""
    return CyclotomicNumber(n, {a % n: _ONE})


CYC_ZERO = from_rational(0)
CYC_ONE = from_rational(1)


def lift(x, m):
    """Rewrite x at conductor m (the current conductor must divide m)."""
    if m % x.conductor:
        raise ValueError("cannot lift conductor %d to %d" % (x.conductor, m))
    if m == x.conductor:
        return x
    step = m // x.conductor
    return CyclotomicNumber(m, {e * step: c for e, c in x.coeffs.items()})


def cyc_add(x, y):
    m = lcm(x.conductor, y.conductor)
    xm, ym = lift(x, m), lift(y, m)
    out = dict(xm.coeffs)
    for e, c in ym.coeffs.items():
        out[e] = out.get(e, _ZERO) + c
    return CyclotomicNumber(m, out)


def cyc_neg(x):
    return CyclotomicNumber(x.conductor, {e: -c for e, c in x.coeffs.items()})


def cyc_scale(x, r):
    r = Fraction(r)
    return CyclotomicNumber(x.conductor,
                            {e: c * r for e, c in x.coeffs.items()})


def cyc_mul(x, y):
    m = lcm(x.conductor, y.conductor)
    xm, ym = lift(x, m), lift(y, m)
    out = {}
    for e1, c1 in xm.coeffs.items():
        for e2, c2 in ym.coeffs.items():
            e = (e1 + e2) % m
            out[e] = out.get(e, _ZERO) + c1 * c2
    return CyclotomicNumber(m, out)


def cyc_pow(x, e):
    if e < 0:
        raise ValueError("negative powers are not supported")
    out = CYC_ONE
    base = x
    while e:
        if e & 1:
            out = cyc_mul(out, base)
        base = cyc_mul(base, base)
        e >>= 1
    return out


def cyc_sum(values):
    out = CYC_ZERO
    for v in values:
        out = cyc_add(out, v)
    return out


def galois_apply(x, j):
    """The field automorphism zeta_n -> zeta_n^j (j coprime to the conductor)."""
    n = x.conductor
    if gcd(j, n) != 1:
        raise ValueError("automorphism exponent %d not coprime to %d" % (j, n))
    return CyclotomicNumber(n, {(e * j) % n: c for e, c in x.coeffs.items()})


def cyc_conjugate(x):
    return galois_apply(x, -1 % x.conductor if x.conductor > 1 else 1)


def cyc_equal(x, y):
    m = lcm(x.conductor, y.conductor)
    return lift(x, m).coeffs == lift(y, m).coeffs


# ---------------------------------------------------------------------------
# traces

def root_trace(n, a):
    """Tr from Q(zeta_n) down to Q of zeta_n^a, by the closed formula
    mu(m) * phi(n) / phi(m) with m = n / gcd(n, a)."""
    if n < 1:
        raise ValueError("conductor must be positive")
    m = n // gcd(n, a % n)
    return Fraction(moebius(m) * (euler_phi(n) // euler_phi(m)))


def trace_to_rationals(x):
    """Q-linear extension of root_trace over x's conductor."""
    n = x.conductor
    total = _ZERO
    for e, c in x.coeffs.items():
        total += c * root_trace(n, e)
    return total


def trace_times_root(x, m, j):
    """Tr_{Q(zeta_M)/Q}(x * zeta_m^j) with M = lcm(conductor(x), m).

    Computed monomial by monomial through root_trace, so the cost is the
    number of canonical coefficients of x regardless of how large M gets.
    """
    n = x.conductor
    big = lcm(n, m)
    sn, sm = big // n, big // m
    shift = (j % m) * sm
    total = _ZERO
    for e, c in x.coeffs.items():
        total += c * root_trace(big, e * sn + shift)
    return total


# ---------------------------------------------------------------------------
# quadratic Gauss sums

def gauss_sqrt(q, delta=None):
    """A cyclotomic square root: the result squares to delta*q, where q is an
    odd prime power and delta = +1 or -1 is forced by q mod 4."""
    pf = is_prime_power(q)
    if pf is None or q % 2 == 0:
        raise UnsupportedInputError("gauss_sqrt needs an odd prime power, "
                                    "got %r" % (q,))
    p, f = pf
    forced = 1 if q % 4 == 1 else -1
    if delta is not None and delta != forced:
        raise UnsupportedInputError("sign %r contradicts q = %d (mod 4 forces "
                                    "%r)" % (delta, q, forced))
    if f % 2 == 0:
        return from_rational(p ** (f // 2))
    scale = Fraction(p ** ((f - 1) // 2))
    return CyclotomicNumber(p, {a: scale * legendre(a, p)
                                for a in range(1, p)})


# ---------------------------------------------------------------------------
# conductor compression

def compress(x):
    """Rewrite x at the smallest conductor m dividing conductor(x) such that
    x lies in Q(zeta_m).  Verified by a round-trip lift."""
    n = x.conductor
    if x.is_zero():
        return CYC_ZERO
    for m in sorted(d for d in range(1, n + 1) if n % d == 0):
        cand = _express_in_subfield(x, m)
        if cand is not None:
            if not cyc_equal(cand, x):
                raise ArithmeticError("compression round-trip failed")
            return cand
    raise AssertionError("unreachable: m = n always succeeds")


def _express_in_subfield(x, m):
    """Solve for coefficients of x in the canonical basis of Q(zeta_m) inside
    Q(zeta_n); returns None when x is not in the subfield."""
    n = x.conductor
    if m == n:
        return x
    phi_n = euler_phi(n)
    phi_m = euler_phi(m)
    cols = []
    for f in range(phi_m):
        basis_vec = lift(zeta(m, f), n)
        cols.append([basis_vec.coeffs.get(e, _ZERO) for e in range(phi_n)])
    target = [x.coeffs.get(e, _ZERO) for e in range(phi_n)]
    sol = _solve_exact(cols, target)
    if sol is None:
        return None
    return CyclotomicNumber(m, dict(enumerate(sol)))


def _solve_exact(cols, target):
    """Solve sum_f sol[f] * cols[f] = target over Q; None if inconsistent."""
    ncols = len(cols)
    nrows = len(target)
    rows = [[cols[f][r] for f in range(ncols)] + [target[r]]
            for r in range(nrows)]
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [v * inv for v in rows[rank]]
        for r in range(nrows):
            if r != rank and rows[r][col]:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    for r in range(rank, nrows):
        if rows[r][ncols]:
            return None
    sol = [_ZERO] * ncols
    for r, col in enumerate(pivots):
        sol[col] = rows[r][ncols]
    return sol


# ---------------------------------------------------------------------------
# serialization (exact, order-normalized by ascending exponent)

def cyc_to_payload(x):
    return {
        "conductor": str(x.conductor),
        "coefficients": [[str(e), str(c.numerator), str(c.denominator)]
                         for e, c in sorted(x.coeffs.items())],
    }


def _parse_int(s, what):
    if isinstance(s, int):
        return s
    if not isinstance(s, str):
        raise CyclotomicFormatError("%s must be a decimal string, got %r"
                                    % (what, s))
    try:
        return int(s, 10)
    except ValueError:
        raise CyclotomicFormatError("%s is not a decimal string: %r"
                                    % (what, s)) from None


def cyc_from_payload(doc):
    if not isinstance(doc, dict) or set(doc) != {"conductor", "coefficients"}:
        raise CyclotomicFormatError("bad cyclotomic payload: %r" % (doc,))
    n = _parse_int(doc["conductor"], "conductor")
    if n < 1:
        raise CyclotomicFormatError("conductor must be positive, got %d" % n)
    coeffs = {}
    seen = set()
    for triple in doc["coefficients"]:
        if not isinstance(triple, (list, tuple)) or len(triple) != 3:
            raise CyclotomicFormatError("coefficient entry %r is not an "
                                        "[exponent, num, den] triple"
                                        % (triple,))
        e = _parse_int(triple[0], "exponent")
        num = _parse_int(triple[1], "numerator")
        den = _parse_int(triple[2], "denominator")
        if den <= 0:
            raise CyclotomicFormatError("denominator must be positive: %r"
                                        % (triple,))
        if e in seen:
            raise CyclotomicFormatError("duplicate exponent %d" % e)
        seen.add(e)
        coeffs[e] = Fraction(num, den)
    return CyclotomicNumber(n, coeffs)
