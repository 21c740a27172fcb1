"""Exact arithmetic in the union of the cyclotomic fields.

A CycNum is a finite rational combination of roots of unity e(q) with
q in Q/Z, stored sparsely.  Addition and multiplication are term maps;
equality and the zero test canonicalize by reducing the associated
polynomial modulo the cyclotomic polynomial of the common order.

Square roots of positive integers are cyclotomic by the classical Gauss
sum evaluation, provided by sqrt_cyclotomic; this is what lets scale
factors |D|^(1/2) be folded into exact matrix entries.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from math import gcd

_PHI_CACHE = {1: [-1, 1]}  # N -> integer coefficients of Phi_N, ascending


def _poly_divmod_int(num, den):
    """Exact division of integer polynomials (ascending coefficients)."""
    num = list(num)
    dden = len(den) - 1
    out = [0] * (max(len(num) - dden, 0))
    for i in range(len(num) - 1, dden - 1, -1):
        q = num[i] // den[dden]
        out[i - dden] = q
        if q:
            for j in range(dden + 1):
                num[i - dden + j] -= q * den[j]
    while num and num[-1] == 0:
        num.pop()
    return out, num


def cyclotomic_polynomial(N):
    """Integer coefficients (ascending) of Phi_N, cached."""
    if N in _PHI_CACHE:
        return _PHI_CACHE[N]
    poly = [0] * N + [1]
    poly[0] = -1  # x^N - 1
    for d in range(1, N):
        if N % d == 0:
            poly, rem = _poly_divmod_int(poly, cyclotomic_polynomial(d))
            assert not rem
    _PHI_CACHE[N] = poly
    return poly


class CycNum:
    """Element of Q(zeta_infinity): finite sum of c * e(q), q in Q/Z."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        # terms: dict {Fraction in [0,1): Fraction}, zeros removed
        self.terms = {}
        if terms:
            for q, c in terms.items():
                q = Fraction(q)
                q -= q.numerator // q.denominator
                c = Fraction(c)
                if c:
                    self.terms[q] = self.terms.get(q, Fraction(0)) + c
                    if not self.terms[q]:
                        del self.terms[q]

    @classmethod
    def e(cls, q):
        """The root of unity e(q) = exp(2 pi i q)."""
        return cls({Fraction(q): Fraction(1)})

    @classmethod
    def from_rational(cls, c):
        return cls({Fraction(0): Fraction(c)})

    zero_ = None
    one_ = None

    def __add__(self, other):
        other = _coerce(other)
        out = dict(self.terms)
        for q, c in other.terms.items():
            out[q] = out.get(q, Fraction(0)) + c
            if not out[q]:
                del out[q]
        r = CycNum.__new__(CycNum)
        r.terms = out
        return r

    __radd__ = __add__

    def __neg__(self):
        r = CycNum.__new__(CycNum)
        r.terms = {q: -c for q, c in self.terms.items()}
        return r

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return CycNum()
            r = CycNum.__new__(CycNum)
            r.terms = {q: c * other for q, c in self.terms.items()}
            return r
        other = _coerce(other)
        out = {}
        for q1, c1 in self.terms.items():
            for q2, c2 in other.terms.items():
                q = q1 + q2
                q -= q.numerator // q.denominator
                v = out.get(q, Fraction(0)) + c1 * c2
                if v:
                    out[q] = v
                elif q in out:
                    del out[q]
        r = CycNum.__new__(CycNum)
        r.terms = out
        return r

    __rmul__ = __mul__

    def conjugate(self):
        r = CycNum.__new__(CycNum)
        r.terms = {}
        for q, c in self.terms.items():
            qq = -q
            qq -= qq.numerator // qq.denominator
            r.terms[qq] = r.terms.get(qq, Fraction(0)) + c
        r.terms = {q: c for q, c in r.terms.items() if c}
        return r

    def order(self):
        """lcm of the denominators of the exponents."""
        N = 1
        for q in self.terms:
            N = N * q.denominator // gcd(N, q.denominator)
        return N

    def is_rational(self):
        return all(q == 0 for q in self.terms) or self.is_zero()

    def rational_value(self):
        if not self.is_rational():
            raise ValueError("not rational")
        return self.terms.get(Fraction(0), Fraction(0))

    def is_zero(self):
        if not self.terms:
            return True
        if len(self.terms) == 1:
            return False  # a single nonzero monomial never vanishes
        N = self.order()
        if N == 1:
            return all(c == 0 for c in self.terms.values())
        # clear coefficient denominators, reduce mod Phi_N
        den = 1
        for c in self.terms.values():
            den = den * c.denominator // gcd(den, c.denominator)
        poly = [0] * N
        for q, c in self.terms.items():
            poly[(q.numerator * (N // q.denominator)) % N] += int(c * den)
        phi = cyclotomic_polynomial(N)
        # remainder of poly mod phi (phi is monic)
        deg = len(phi) - 1
        for i in range(N - 1, deg - 1, -1):
            c = poly[i]
            if c:
                for j in range(deg + 1):
                    poly[i - deg + j] -= c * phi[j]
        return all(c == 0 for c in poly)

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return (self - other).is_zero()

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __bool__(self):
        return not self.is_zero()

    def to_complex(self):
        return sum(float(c) * cmath.exp(2j * cmath.pi * float(q))
                   for q, c in self.terms.items()) if self.terms else 0j

    def __repr__(self):
        if not self.terms:
            return "CycNum(0)"
        parts = [f"{c}*e({q})" if q else f"{c}" for q, c in sorted(self.terms.items())]
        return "CycNum(" + " + ".join(parts) + ")"


def _coerce(x):
    if isinstance(x, CycNum):
        return x
    if isinstance(x, (int, Fraction)):
        return CycNum.from_rational(x)
    raise TypeError(f"cannot coerce {type(x)} to CycNum")


def _sqrt_squarefree_odd(u):
    """sqrt(u) for odd squarefree positive u, via the quadratic Gauss sum
    g(u) = sum e(k^2/u), which equals sqrt(u) or i*sqrt(u)."""
    if u == 1:
        return CycNum.from_rational(1)
    g = CycNum()
    for k in range(u):
        g = g + CycNum.e(Fraction(k * k, u))
    if u % 4 == 1:
        return g
    return g * CycNum.e(Fraction(-1, 4))  # g = i sqrt(u)


def sqrt_cyclotomic(n):
    """Exact CycNum equal to the positive square root of the positive
    integer n."""
    if n <= 0:
        raise ValueError("positive integer required")
    f = 1
    m = n
    k = 2
    while k * k <= m:
        while m % (k * k) == 0:
            m //= k * k
            f *= k
        k += 1
    out = CycNum.from_rational(f)
    if m % 2 == 0:
        out = out * (CycNum.e(Fraction(1, 8)) + CycNum.e(Fraction(-1, 8)))  # sqrt(2)
        m //= 2
    return out * _sqrt_squarefree_odd(m)
