"""Imaginary quadratic field invariants and L-function analytics.

The field k = Q(sqrt(d)) for a negative odd fundamental discriminant d:
class number by counting reduced binary forms, Kronecker character, the
ideal-count function rho, Diff sets via ternary Hilbert-symbol isotropy,
and L(chi, s) with its derivative at s = 0 through the log-Gamma route
(which is the Chowla-Selberg evaluation in disguise).

LogLinear is the currency of arithmetic degrees: an exact element of the
Q-span of 1, log p (p prime), the Euler-Mascheroni constant, log pi,
log|d_k|, and L'/L(chi, 0).  The last two stay symbolic so that degree
identities can be checked coefficientwise.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

import mpmath

from .lattice import QuadLattice
from .linalg import diagonalize_quadratic

SPECIAL_SYMBOLS = ("gamma", "log_pi", "log_abs_d", "Lprime_over_L")


@dataclass(frozen=True)
class LogLinear:
    """rational + sum r_p log p + sum c_s * (special symbol)."""

    rational: Fraction = Fraction(0)
    logs: tuple = ()       # sorted tuple of (prime, Fraction)
    specials: tuple = ()   # sorted tuple of (symbol, Fraction)

    @classmethod
    def make(cls, rational=0, logs=None, specials=None):
        lg = tuple(sorted((int(p), Fraction(c)) for p, c in (logs or {}).items()
                          if Fraction(c) != 0))
        sp = []
        for s, c in (specials or {}).items():
            if s not in SPECIAL_SYMBOLS:
                raise ValueError(f"unknown special symbol {s!r}")
            if Fraction(c) != 0:
                sp.append((s, Fraction(c)))
        return cls(Fraction(rational), lg, tuple(sorted(sp)))

    @classmethod
    def log_prime(cls, p, coeff=1):
        return cls.make(logs={p: coeff})

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LogLinear.make(other)
        logs = dict(self.logs)
        for p, c in other.logs:
            logs[p] = logs.get(p, Fraction(0)) + c
        sp = dict(self.specials)
        for s, c in other.specials:
            sp[s] = sp.get(s, Fraction(0)) + c
        return LogLinear.make(self.rational + other.rational, logs, sp)

    __radd__ = __add__

    def __neg__(self):
        return LogLinear.make(-self.rational,
                              {p: -c for p, c in self.logs},
                              {s: -c for s, c in self.specials})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LogLinear.make(other)
        return self + (-other)

    def __rsub__(self, other):
        return LogLinear.make(other) + (-self)

    def __mul__(self, c):
        c = Fraction(c)
        return LogLinear.make(self.rational * c,
                              {p: v * c for p, v in self.logs},
                              {s: v * c for s, v in self.specials})

    __rmul__ = __mul__

    def is_zero(self):
        return self.rational == 0 and not self.logs and not self.specials

    def evaluate(self, field=None, dps=30):
        """Numeric value; a field is required whenever log|d| or L'/L occur."""
        with mpmath.workdps(dps + 10):
            total = mpmath.mpf(self.rational.numerator) / self.rational.denominator
            for p, c in self.logs:
                total += mpmath.mpf(c.numerator) / c.denominator * mpmath.log(p)
            for s, c in self.specials:
                coeff = mpmath.mpf(c.numerator) / c.denominator
                if s == "gamma":
                    total += coeff * mpmath.euler
                elif s == "log_pi":
                    total += coeff * mpmath.log(mpmath.pi)
                elif s == "log_abs_d":
                    if field is None:
                        raise ValueError("field required to evaluate log|d|")
                    total += coeff * mpmath.log(abs(field.d))
                elif s == "Lprime_over_L":
                    if field is None:
                        raise ValueError("field required to evaluate L'/L")
                    total += coeff * L_derivative_data(field, dps=dps)["Lprime_over_L"]
            return +total

    def to_json(self):
        return {
            "rational": str(self.rational),
            "logs": {str(p): str(c) for p, c in self.logs},
            "specials": {s: str(c) for s, c in self.specials},
        }

    def __repr__(self):
        parts = []
        if self.rational:
            parts.append(str(self.rational))
        parts += [f"{c}*log({p})" for p, c in self.logs]
        parts += [f"{c}*{s}" for s, c in self.specials]
        return "LogLinear(" + (" + ".join(parts) if parts else "0") + ")"


def kronecker_symbol(a, n):
    """Kronecker symbol (a/n) for integers a, n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    if n < 0:
        return (-1 if a < 0 else 1) * kronecker_symbol(a, -n)
    result = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _squarefree(n):
    n = abs(n)
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return n != 0


def reduced_forms(d):
    """Reduced positive binary quadratic forms (a, b, c) of discriminant d:
    b^2 - 4ac = d, |b| <= a <= c, with b >= 0 when |b| = a or a = c."""
    if d >= 0 or d % 4 not in (0, 1):
        raise ValueError("d must be a negative discriminant")
    forms = []
    for b in range(abs(d) % 2, isqrt(-d // 3) + 1, 2):
        ac4 = b * b - d
        if ac4 % 4:
            continue
        ac = ac4 // 4
        a = max(b, 1)
        while a * a <= ac:
            if ac % a == 0:
                c = ac // a
                if b <= a <= c:
                    forms.append((a, b, c))
                    if 0 < b < a < c:
                        forms.append((a, -b, c))
            a += 1
    return sorted(forms)


@dataclass(frozen=True)
class ImQField:
    """Invariants of k = Q(sqrt(d)) for odd fundamental d < 0."""

    d: int
    h: int
    w: int

    @classmethod
    def from_discriminant(cls, d):
        d = int(d)
        if d >= 0 or d % 2 == 0:
            raise ValueError("discriminant must be negative and odd")
        if d % 4 != 1 or not _squarefree(d):
            raise ValueError("discriminant must be fundamental (odd case: squarefree, 1 mod 4)")
        h = len(reduced_forms(d))
        w = 6 if d == -3 else 2
        return cls(d, h, w)

    def chi(self, n):
        return kronecker_symbol(self.d, int(n))

    def __repr__(self):
        return f"ImQField(d={self.d}, h={self.h}, w={self.w})"


def rho(K: ImQField, m) -> int:
    """Number of integral ideals of norm m; zero off the positive integers."""
    m = Fraction(m)
    if m <= 0 or m.denominator != 1:
        return 0
    m = m.numerator
    total = 0
    e = 1
    while e * e <= m:
        if m % e == 0:
            total += K.chi(e)
            f = m // e
            if f != e:
                total += K.chi(f)
        e += 1
    return total


@functools.lru_cache(maxsize=None)
def _form_histogram(d, bound):
    """counts[m] = number of (x, y) with f(x,y) = m <= bound, summed over
    all reduced forms of discriminant d."""
    counts = [0] * (bound + 1)
    for a, b, c in reduced_forms(d):
        # a x^2 + b x y + c y^2 <= bound: |y| <= sqrt(4 a bound / |d|)
        ymax = isqrt(4 * a * bound // (-d)) + 1
        for y in range(-ymax, ymax + 1):
            # a x^2 + b x y + (c y^2 - bound) <= 0
            disc = b * b * y * y - 4 * a * (c * y * y - bound)
            if disc < 0:
                continue
            r = isqrt(disc)
            xlo = (-b * y - r) // (2 * a) - 1
            xhi = (-b * y + r) // (2 * a) + 1
            for x in range(xlo, xhi + 1):
                val = a * x * x + b * x * y + c * y * y
                if 0 <= val <= bound:
                    counts[val] += 1
    return counts

RHO_ORACLE_BOUND = 10 ** 4


def rho_bruteforce(K: ImQField, m: int) -> int:
    """Independent oracle for rho: (1/w) * number of representations of m
    by the h reduced forms of discriminant d (form/ideal correspondence)."""
    m = int(m)
    if m <= 0:
        return 0
    if m > RHO_ORACLE_BOUND:
        raise ValueError(f"oracle bound {RHO_ORACLE_BOUND} exceeded")
    counts = _form_histogram(K.d, RHO_ORACLE_BOUND)
    reps = counts[m]
    assert reps % K.w == 0
    return reps // K.w


def _val(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def ord_p(x, p) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero")
    vn, _ = _val(abs(x.numerator), p)
    vd, _ = _val(x.denominator, p)
    return vn - vd


def hilbert_symbol(a, b, p) -> int:
    """Hilbert symbol (a, b)_p over Q_p (p prime) or over R (p = 'inf')."""
    a = Fraction(a)
    b = Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("hilbert symbol requires nonzero arguments")
    if p == "inf" or p == 0:
        return -1 if (a < 0 and b < 0) else 1
    p = int(p)
    # reduce to integers
    a = a.numerator * a.denominator
    b = b.numerator * b.denominator
    alpha, u = _val(abs(a), p)
    u *= -1 if a < 0 else 1
    beta, v = _val(abs(b), p)
    v *= -1 if b < 0 else 1
    if p != 2:
        eps = (p - 1) // 2
        s = 1
        if alpha % 2 and beta % 2:
            s *= (-1) ** (eps % 2)
        if beta % 2:
            s *= kronecker_symbol(u % p, p)
        if alpha % 2:
            s *= kronecker_symbol(v % p, p)
        return s
    # p = 2: (a,b)_2 = (-1)^(eps(u)eps(v) + alpha*omega(v) + beta*omega(u))
    def eps2(n):
        return ((n - 1) // 2) % 2

    def omega2(n):
        return ((n * n - 1) // 8) % 2

    e = eps2(u) * eps2(v) + alpha * omega2(v) + beta * omega2(u)
    return -1 if e % 2 else 1


def diff_set(L0: QuadLattice, m) -> frozenset:
    """Finite primes p where L0 (x) Q_p fails to represent m > 0.

    Decided through the ternary criterion: <a1, a2, -m> is isotropic over
    Q_p iff the Hasse invariant equals (-1, -det)_p.
    """
    m = Fraction(m)
    if m <= 0:
        raise ValueError("diff_set requires m > 0")
    if L0.rank != 2 or not L0.is_negative_definite():
        raise ValueError("diff_set requires a negative definite binary lattice")
    a1, a2 = diagonalize_quadratic([list(r) for r in L0.gram])
    coeffs = [a1, a2, -m]
    # candidate primes: 2 and everything dividing a numerator or denominator
    cands = {2}
    for x in coeffs:
        for n in (abs(x.numerator), x.denominator):
            k = 2
            while k * k <= n:
                if n % k == 0:
                    cands.add(k)
                    while n % k == 0:
                        n //= k
                k += 1
            if n > 1:
                cands.add(n)
    det = coeffs[0] * coeffs[1] * coeffs[2]
    out = set()
    for p in sorted(cands):
        hasse = (hilbert_symbol(coeffs[0], coeffs[1], p)
                 * hilbert_symbol(coeffs[0], coeffs[2], p)
                 * hilbert_symbol(coeffs[1], coeffs[2], p))
        if hasse != hilbert_symbol(-1, -det, p):
            out.add(p)
    return frozenset(out)


# ---------------------------------------------------------------------------
# L-functions


def L_chi_exact_at_0(K: ImQField) -> Fraction:
    """L(chi, 0) = -(1/|d|) sum chi(a) a, exactly."""
    q = -K.d
    return Fraction(-sum(K.chi(a) * a for a in range(1, q)), q)


def L_chi(K: ImQField, s, dps=30):
    """L(chi, s) by the Hurwitz zeta expansion q^-s sum chi(a) zeta(s, a/q)."""
    q = -K.d
    with mpmath.workdps(2 * dps + 10):
        s = mpmath.mpmathify(s)
        total = mpmath.mpf(0)
        for a in range(1, q):
            c = K.chi(a)
            if c:
                total += c * mpmath.zeta(s, mpmath.mpf(a) / q)
        val = mpmath.power(q, -s) * total
        return +val


@functools.lru_cache(maxsize=None)
def _lderiv_cached(d, dps):
    K = ImQField.from_discriminant(d)
    q = -d
    L0 = L_chi_exact_at_0(K)
    with mpmath.workdps(2 * dps + 10):
        # L'(chi,0) = sum chi(a) logGamma(a/q) - log(q) L(chi,0)
        acc = mpmath.mpf(0)
        for a in range(1, q):
            c = K.chi(a)
            if c:
                acc += c * mpmath.loggamma(mpmath.mpf(a) / q)
        lp = acc - mpmath.log(q) * mpmath.mpf(L0.numerator) / L0.denominator
        ratio = lp * Fraction(L0.denominator, L0.numerator)
        return +lp, +ratio


def L_derivative_data(K: ImQField, dps=30):
    """Exact L(chi, 0) plus high-precision L'(chi, 0) and L'/L(chi, 0)."""
    L0 = L_chi_exact_at_0(K)
    assert L0 == Fraction(2 * K.h, K.w), "character sum disagrees with 2h/w"
    lp, ratio = _lderiv_cached(K.d, dps)
    return {"L_at_0": L0, "Lprime_at_0": lp, "Lprime_over_L": ratio}


def completed_lambda(K: ImQField, s, dps=30):
    """Lambda(s) = (|d|/pi)^((s+1)/2) Gamma((s+1)/2) L(chi, s)."""
    with mpmath.workdps(2 * dps + 10):
        s = mpmath.mpmathify(s)
        pref = mpmath.power(mpmath.mpf(-K.d) / mpmath.pi, (s + 1) / 2)
        return +(pref * mpmath.gamma((s + 1) / 2) * L_chi(K, s, dps=dps))


def rankin_selberg_L(b_coeffs, theta, s, cutoff, growth=(1, 2), dps=30,
                     emb=None):
    """Truncated Rankin-Selberg Dirichlet series against a theta table.

    b_coeffs maps an exponent m to a (conjugated) coefficient vector: on
    the theta group's cosets directly, or, when a sublattice embedding is
    supplied, on the ambient group with the pairing running through the
    extension-by-zero / restriction-of-functions description.  growth =
    (C, e) certifies |{b(m), R(m)}| <= C m^e for the tail estimate.

    Returns (value, tail_bound).  Raises outside the certified half-plane.
    """
    n = theta.group.lattice.rank
    C, e = growth
    restricted = None
    if emb is not None:
        from .lattice import glue_cosets as _glue
        amb_group = emb.ambient.disc_group()
        theta_index = {c.coords: i for i, c in enumerate(theta.group.elements())}
        restricted = []
        for mu in amb_group.elements():
            # restriction hits the glue pairs with trivial sublattice part
            idxs = [theta_index[mu2.coords] for mu1, mu2 in _glue(emb, mu)
                    if mu1.is_zero()]
            restricted.append(idxs)
    with mpmath.workdps(2 * dps + 10):
        s = mpmath.mpmathify(s)
        sigma = mpmath.re(s)
        expo = (sigma + n) / 2
        if expo <= e + 1:
            raise ValueError("outside certified convergence region")
        gam = mpmath.gamma((s + n) / 2)
        total = mpmath.mpf(0)
        for m, vec in sorted(b_coeffs.items()):
            m = Fraction(m)
            if m <= 0 or m > cutoff:
                continue
            rvec = theta.coefficient(m)
            if restricted is None:
                pairing = sum(mpmath.mpmathify(complex(a)) * int(b)
                              for a, b in zip(vec, rvec))
            else:
                pairing = sum(mpmath.mpmathify(complex(a)) * sum(rvec[i] for i in idxs)
                              for a, idxs in zip(vec, restricted))
            total += pairing / mpmath.power(4 * mpmath.pi * float(m), (s + n) / 2)
        total *= gam
        # tail: C * Gamma * (4 pi)^(-expo) * integral_cutoff^inf t^(e - expo) dt
        tail = (abs(gam) * C * mpmath.power(4 * mpmath.pi, -expo)
                * mpmath.power(cutoff, e + 1 - expo) / (expo - e - 1))
        return +total, +tail
