"""Small exact number-theory helpers shared across the package.

Everything here operates on plain Python integers and is cheap at the
sizes we care about (inputs are bounded by group exponents, which stay
well below 10**6 for the supported tables).
"""

from functools import lru_cache
from math import gcd, isqrt


@lru_cache(maxsize=None)
def factorize(n):
    """Return the prime factorization of n >= 1 as a dict {prime: exponent}."""
    if n < 1:
        raise ValueError("factorize expects a positive integer, got %r" % (n,))
    out = {}
    m = n
    d = 2
    while d * d <= m:
        while m % d == 0:
            out[d] = out.get(d, 0) + 1
            m //= d
        d += 1 if d == 2 else 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


@lru_cache(maxsize=None)
def divisors(n):
    """All positive divisors of n, ascending."""
    out = [1]
    for p, e in factorize(n).items():
        out = [d * p ** k for d in out for k in range(e + 1)]
    return tuple(sorted(out))


def prime_divisors(n):
    return tuple(sorted(factorize(n)))


@lru_cache(maxsize=None)
def euler_phi(n):
    phi = n
    for p in factorize(n):
        phi = phi // p * (p - 1)
    return phi


@lru_cache(maxsize=None)
def moebius(n):
    mu = 1
    for _, e in factorize(n).items():
        if e > 1:
            return 0
        mu = -mu
    return mu


def is_prime(n):
    if n < 2:
        return False
    return factorize(n) == {n: 1}


def is_prime_power(n):
    """Return (p, f) with n = p**f if n is a prime power, else None."""
    if n < 2:
        return None
    fac = factorize(n)
    if len(fac) != 1:
        return None
    ((p, f),) = fac.items()
    return p, f


def v2(n):
    """2-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("v2(0) is undefined")
    n = abs(n)
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    return v


def odd_part(n):
    return abs(n) >> v2(n) if n else 0


def is_squarefree(n):
    if n == 0:
        return False
    return all(e == 1 for e in factorize(abs(n)).values())


def legendre(a, p):
    """Legendre symbol (a|p) for an odd prime p, values in {-1, 0, 1}."""
    a %= p
    if a == 0:
        return 0
    s = pow(a, (p - 1) // 2, p)
    return 1 if s == 1 else -1


def is_square_in_field(e, p, f):
    """Whether the image of the integer e is a square in the field with p**f
    elements (p odd).  Zero counts as a square."""
    if e % p == 0:
        return True
    if f % 2 == 0:
        # the prime subfield lies inside the quadratic subextension
        return True
    return legendre(e, p) == 1


def lcm(*ns):
    out = 1
    for n in ns:
        out = out * n // gcd(out, n)
    return out


def squarefree_part(n):
    """Largest squarefree divisor structure: returns (s, m) with n = s * m**2,
    s squarefree, for n >= 1."""
    s, m = 1, 1
    for p, e in factorize(n).items():
        if e % 2:
            s *= p
        m *= p ** (e // 2)
    return s, m


def isqrt_exact(n):
    """Integer square root if n is a perfect square, else None."""
    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None
