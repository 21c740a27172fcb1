"""Degrees of the CM special divisors: the closed formula

    weighted_count = 2^(s(mu) - 1) ord_p(p m) rho(m |d| / p^eps)
    degree = weighted_count * log p        (Diff = {p}, Q(mu) = m mod Z)

together with an independent brute-force oracle for class number one,
which counts special quasi-endomorphisms of norm m inside an explicitly
constructed maximal order of the quaternion algebra ramified at p and
infinity.  The prime-above-p bookkeeping cancels in the degree: the
length of each point is ord_p(pm) log p / log N(P), and the degree sums
length * log N(P) over points weighted by 1/#Aut.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .eisenstein import EisensteinPackage, s_mu
from .imq import ImQField, LogLinear, hilbert_symbol, ord_p, rho
from .lattice import Coset, QuadLattice, enumerate_coset_vectors
from .linalg import (
    det_fraction,
    integer_kernel,
    inverse_fraction,
    lattice_basis,
    lattice_intersection,
    lattice_member,
    mat_vec,
    solve_integer,
    sqrt_fraction_exact,
)


@dataclass(frozen=True)
class QuaternionAlgebra:
    """(a, b / Q): i^2 = a, j^2 = b, ij = -ji = k."""

    a: Fraction
    b: Fraction

    def mul(self, x, y):
        a, b = self.a, self.b
        x0, x1, x2, x3 = x
        y0, y1, y2, y3 = y
        return (
            x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
            x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
            x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        )

    def conj(self, x):
        return (x[0], -x[1], -x[2], -x[3])

    def trd(self, x):
        return 2 * x[0]

    def nrd(self, x):
        return (x[0] * x[0] - self.a * x[1] * x[1] - self.b * x[2] * x[2]
                + self.a * self.b * x[3] * x[3])

    def ramified_primes(self):
        """Finite ramification set, computed from Hilbert symbols; the set
        including infinity always has even cardinality."""
        cands = {2}
        for val in (self.a, self.b):
            for n in (abs(val.numerator), val.denominator):
                k = 2
                while k * k <= n:
                    if n % k == 0:
                        cands.add(k)
                        while n % k == 0:
                            n //= k
                    k += 1
                if n > 1:
                    cands.add(n)
        finite = {p for p in cands if hilbert_symbol(self.a, self.b, p) == -1}
        infinite = hilbert_symbol(self.a, self.b, "inf") == -1
        assert (len(finite) + (1 if infinite else 0)) % 2 == 0
        return frozenset(finite), infinite


class QuaternionOrder:
    """An order given by a basis (rows, coordinates in 1, i, j, k)."""

    def __init__(self, algebra: QuaternionAlgebra, basis):
        self.algebra = algebra
        self.basis = [[Fraction(x) for x in row] for row in basis]
        if len(self.basis) != 4:
            raise ValueError("order basis must have rank 4")
        self._check()

    def _check(self):
        alg = self.algebra
        # contains 1
        if lattice_member([list(b) for b in self._cols()], [1, 0, 0, 0]) is None:
            raise ValueError("order must contain 1")
        for row in self.basis:
            t = alg.trd(row)
            n = alg.nrd(row)
            if Fraction(t).denominator != 1 or Fraction(n).denominator != 1:
                raise ValueError("order basis must be integral")
        # closed under multiplication
        for x in self.basis:
            for y in self.basis:
                if lattice_member(self._cols(), list(alg.mul(tuple(x), tuple(y)))) is None:
                    raise ValueError("order basis is not multiplicatively closed")

    def _cols(self):
        return [list(b) for b in self.basis]

    def contains(self, x):
        return lattice_member(self._cols(), list(x)) is not None

    def trace_gram(self):
        alg = self.algebra
        return [[alg.trd(alg.mul(tuple(x), tuple(y))) for y in self.basis]
                for x in self.basis]

    def reduced_discriminant(self) -> int:
        d2 = abs(det_fraction(self.trace_gram()))
        root = sqrt_fraction_exact(d2)
        assert root is not None and root.denominator == 1
        return int(root)

    def is_maximal(self):
        finite, _ = self.algebra.ramified_primes()
        target = 1
        for p in finite:
            target *= p
        return self.reduced_discriminant() == target


def _closure(alg: QuaternionAlgebra, generators, max_rounds=16):
    """Smallest multiplicatively closed lattice containing the generators.

    Bounded: adjoining an integral element need not generate a finitely
    generated module in a noncommutative algebra, so a candidate whose
    closure keeps growing is rejected rather than looped on."""
    basis = lattice_basis([list(g) for g in generators])
    for _ in range(max_rounds):
        prods = [list(b) for b in basis]
        for x, y in itertools.product(basis, repeat=2):
            prods.append(list(alg.mul(tuple(x), tuple(y))))
        new_basis = lattice_basis(prods)
        if new_basis == basis:
            return basis
        basis = new_basis
    raise ValueError("multiplicative closure does not stabilize")


def saturate_to_maximal(alg: QuaternionAlgebra, order: QuaternionOrder):
    """Enlarge an order to a maximal one by repeatedly adjoining integral
    elements with prime denominator dividing the discriminant defect."""
    finite, _ = alg.ramified_primes()
    target = 1
    for q in finite:
        target *= q
    for _ in range(64):
        disc = order.reduced_discriminant()
        if disc == target:
            break
        defect = disc // target
        found = False
        for l in _prime_divisors(defect):
            for coeffs in itertools.product(range(l), repeat=4):
                if not any(coeffs):
                    continue
                x = [sum(Fraction(coeffs[r]) * order.basis[r][i] for r in range(4))
                     / l for i in range(4)]
                if (Fraction(alg.trd(x)).denominator != 1
                        or Fraction(alg.nrd(x)).denominator != 1):
                    continue
                try:
                    cols = _closure(alg, [list(b) for b in order.basis] + [x])
                    cand = [[c[i] for i in range(4)] for c in cols]
                    bigger = QuaternionOrder(alg, cand)
                except ValueError:
                    continue
                if bigger.reduced_discriminant() < disc:
                    order = bigger
                    found = True
                    break
            if found:
                break
        if not found:
            raise RuntimeError("saturation failed to enlarge a non-maximal order")
    assert order.is_maximal()
    return order


def construct_Bpinfty(p: int):
    """A quaternion algebra ramified exactly at p and infinity, plus a
    maximal order found by saturating the obvious order Z<1, i, j, k>."""
    p = int(p)
    candidates = [Fraction(-1), Fraction(-2), Fraction(-3), Fraction(-5),
                  Fraction(-7), Fraction(-11), Fraction(-13), Fraction(-17),
                  Fraction(-19), Fraction(-23)]
    alg = None
    if p == 2:
        alg = QuaternionAlgebra(Fraction(-1), Fraction(-1))
    else:
        for a in candidates:
            trial = QuaternionAlgebra(a, Fraction(-p))
            finite, infinite = trial.ramified_primes()
            if finite == {p} and infinite:
                alg = trial
                break
    if alg is None:
        raise ValueError(f"no standard algebra found for p = {p}")
    order = QuaternionOrder(alg, [[1, 0, 0, 0], [0, 1, 0, 0],
                                  [0, 0, 1, 0], [0, 0, 0, 1]])
    return alg, saturate_to_maximal(alg, order)


def _prime_divisors(n):
    out = []
    k = 2
    n = abs(n)
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def embed_cm(order: QuaternionOrder, K: ImQField):
    """An element of the order with the minimal polynomial of (d + sqrt(d))/2,
    i.e. reduced trace d and reduced norm (d^2 - d)/4, by exact enumeration.

    Exists iff the ramified prime of the algebra is non-split in K (the
    caller is expected to reject split primes earlier)."""
    alg = order.algebra
    d = K.d
    target_trace = d
    target_norm = Fraction(d * d - d, 4)
    # solve trd(sum c_r b_r) = d over the integers; trd is linear
    tvec = [alg.trd(tuple(b)) for b in order.basis]
    sol = solve_integer([[int(t) for t in tvec]], [target_trace])
    if sol is None:
        raise ValueError("no optimal embedding")
    kernel = integer_kernel([[int(t) for t in tvec]])
    kcols = [[kernel[i][j] for i in range(4)] for j in range(len(kernel[0]))]
    # norm on the affine slice sol + <kernel>: even integral gram
    def basis_vec(c):
        return [sum(Fraction(c[r]) * order.basis[r][i] for r in range(4))
                for i in range(4)]
    x0 = basis_vec(sol)
    kvecs = [basis_vec(c) for c in kcols]
    n = len(kvecs)
    bil = [[alg.trd(alg.mul(tuple(u), alg.conj(tuple(v)))) for v in kvecs]
           for u in kvecs]
    gram = [[int(x) for x in row] for row in bil]
    slice_lat = QuadLattice(gram)
    # coset shift: coordinates of x0 over the kernel lattice (rational)
    # Q(x0 + sum t_i k_i) = nrd(...): expand around x0
    # nrd(x) = Q0 + sum t_i B(x0, k_i) + (1/2) sum t_i t_j gram_ij
    # complete the square by shifting the coset: solve gram * s = B(x0, k)
    bvec = [alg.trd(alg.mul(tuple(x0), alg.conj(tuple(kv)))) for kv in kvecs]
    shift = mat_vec(inverse_fraction(gram), bvec)
    const = alg.nrd(tuple(x0)) - Fraction(1, 2) * sum(
        shift[i] * gram[i][j] * shift[j] for i in range(n) for j in range(n))
    m = target_norm - const
    sols = enumerate_coset_vectors(slice_lat, shift, m)
    if not sols:
        raise ValueError("no optimal embedding")
    t = [x - s for x, s in zip(sols[0], shift)]
    alpha = tuple(x0[i] + sum(t[j] * kvecs[j][i] for j in range(n))
                  for i in range(4))
    # verify the minimal polynomial exactly
    sq = alg.mul(alpha, alpha)
    want = tuple(Fraction(d) * alpha[i] - (target_norm if i == 0 else 0)
                 for i in range(4))
    assert sq == want, "embedding fails its minimal polynomial"
    return alpha


@dataclass
class CMDegree:
    m: Fraction
    mu_coords: tuple
    prime: int | None
    weighted_count: Fraction
    degree: LogLinear

    def __post_init__(self):
        assert (self.weighted_count == 0) == self.degree.is_zero()


def degree_formula(pkg: EisensteinPackage, m, mu: Coset) -> CMDegree:
    """Closed-form degree of the CM special divisor at (m, mu)."""
    m = Fraction(m)
    if m <= 0:
        raise ValueError("degree_formula requires m > 0")
    K = pkg.K
    if (m - pkg.disc0.q_map(mu)) % 1 != 0:
        return CMDegree(m, mu.coords, None, Fraction(0), LogLinear.make(0))
    diff = pkg.diff(m)
    if len(diff) != 1:
        return CMDegree(m, mu.coords, None, Fraction(0), LogLinear.make(0))
    (p,) = diff
    chi_p = K.chi(p)
    assert chi_p != 1
    eps = 1 if chi_p == -1 else 0
    r = rho(K, m * abs(K.d) / Fraction(p) ** eps)
    length = ord_p(p * m, p)
    wc = Fraction(2) ** (s_mu(pkg, mu) - 1) * length * r
    if r == 0 or length <= 0:
        wc = Fraction(0)
    return CMDegree(m, mu.coords, p, wc,
                    LogLinear.make(0, {p: wc}) if wc else LogLinear.make(0))


@functools.lru_cache(maxsize=None)
def _cm_order_data(p, d, skip_models=0):
    """Maximal order of B_{p, infinity} built around an optimal embedding of
    the maximal order of Q(sqrt d): the algebra model is (d, b), so theta =
    (d + i)/2 is the CM element by construction.  Returns the algebra, the
    order, theta, and a basis of O^- = {x : x theta = conj(theta) x}.

    Constructing the order around the embedding matters: for larger p the
    algebra has several conjugacy classes of maximal orders and not all of
    them admit the embedding.  skip_models picks a later algebra model
    (d, -q); counts must not depend on the choice, which tests exploit.
    """
    alg = None
    remaining = skip_models
    for q in range(1, 2000):
        trial = QuaternionAlgebra(Fraction(d), Fraction(-q))
        finite, infinite = trial.ramified_primes()
        if finite == {p} and infinite:
            if remaining == 0:
                alg = trial
                break
            remaining -= 1
    if alg is None:
        raise RuntimeError(f"no algebra model (d, -q) found for p = {p}")
    theta = (Fraction(d, 2), Fraction(1, 2), Fraction(0), Fraction(0))
    j = (Fraction(0), Fraction(0), Fraction(1), Fraction(0))
    jtheta = alg.mul(j, theta)
    order = QuaternionOrder(alg, [[1, 0, 0, 0], list(theta), list(j), list(jtheta)])
    order = saturate_to_maximal(alg, order)
    assert order.contains(theta)
    # O^-: kernel of x -> x theta + theta x - d x on the order
    rows = []
    for b in order.basis:
        img = tuple(alg.mul(tuple(b), theta)[i] + alg.mul(theta, tuple(b))[i]
                    - Fraction(d) * b[i] for i in range(4))
        rows.append(list(img))
    # express images in the order basis to keep the kernel integral
    den = 1
    for img in rows:
        for x in img:
            den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    mat = [[int(Fraction(x) * den) for x in img] for img in rows]
    ker = integer_kernel([[mat[r][i] for r in range(4)] for i in range(4)])
    ominus = []
    for jcol in range(len(ker[0]) if ker and ker[0] else 0):
        coeffs = [ker[r][jcol] for r in range(4)]
        vec = [sum(Fraction(coeffs[r]) * order.basis[r][i] for r in range(4))
               for i in range(4)]
        ominus.append(vec)
    assert len(ominus) == 2, "conjugate-linear part must have rank 2"
    return alg, order, theta, ominus


def _iota_matrix(theta):
    """The embedding k -> B sending the standard generator w = (d + sqrt d)/2
    to theta; k-coordinates are (u, v) with beta = u + v w."""
    def iota(u, v):
        return tuple(Fraction(u) * (1 if i == 0 else 0) + Fraction(v) * theta[i]
                     for i in range(4))
    return iota


def _module_lattice(alg, left_gens, right_gens):
    """Z-lattice spanned by all products x * y (x in left, y in right)."""
    gens = []
    for x in left_gens:
        for y in right_gens:
            gens.append(list(alg.mul(tuple(x), tuple(y))))
    return lattice_basis(gens)


def degree_bruteforce(pkg: EisensteinPackage, m, mu: Coset,
                      skip_models=0) -> CMDegree:
    """Oracle for degree_formula, restricted to class number one.

    Realizes the special quasi-endomorphisms as an explicit rank-2 lattice
    inside the quaternion algebra ramified at Diff(m) and infinity, counts
    the coset vectors of norm m exactly, and applies the canonical-lifting
    length ord_p(pm) and the 1/w automorphism weight.
    """
    m = Fraction(m)
    K = pkg.K
    if K.h != 1:
        raise ValueError("brute-force oracle requires class number one")
    if m <= 0:
        raise ValueError("m must be positive")
    diff = pkg.diff(m)
    if len(diff) != 1:
        raise ValueError("oracle requires Diff = {p}; degree vanishes otherwise")
    (p,) = diff
    if ord_p(m, p) < 0:
        raise ValueError("oracle requires ord_p(m) >= 0")
    alg, order, theta, ominus = _cm_order_data(p, K.d, skip_models)
    d = K.d

    # k acts on L0 through the even Clifford algebra: w_cl = e1 e2 with
    # w_cl e1 = [e1,e2] e1 - Q(e1) e2, w_cl e2 = Q(e2) e1; the standard
    # generator is w = (d - t)/2 + w_cl with t = [e1, e2]
    G = pkg.L0.gram
    t = G[0][1]
    q1 = Fraction(G[0][0], 2)
    q2 = Fraction(G[1][1], 2)
    Wcl = [[Fraction(t), q2], [-q1, Fraction(0)]]
    c = Fraction(d - t, 2)
    Wstd = [[Wcl[0][0] + c, Wcl[0][1]], [Wcl[1][0], Wcl[1][1] + c]]
    # sanity: Wstd satisfies x^2 - d x + (d^2 - d)/4 = 0
    tr = Wstd[0][0] + Wstd[1][1]
    det = Wstd[0][0] * Wstd[1][1] - Wstd[0][1] * Wstd[1][0]
    assert tr == d and det == Fraction(d * d - d, 4)

    # the fractional ideal a with L0 = a * e1: (u, v) with u e1 + v (w e1)
    # integral; A maps k-coordinates to L0-coordinates
    A = [[Fraction(1), Wstd[0][0]], [Fraction(0), Wstd[1][0]]]
    Ainv = inverse_fraction(A)
    a_basis = [[Ainv[0][0], Ainv[1][0]], [Ainv[0][1], Ainv[1][1]]]  # columns
    # different^{-1} * a: divide by sqrt(d) = 2w - d
    Rdelta = [[Fraction(-d), Fraction(-(d * d - d), 2)],
              [Fraction(2), Fraction(d)]]
    Rdelta_inv = inverse_fraction(Rdelta)
    dinv_a_basis = [mat_vec(Rdelta_inv, col) for col in a_basis]

    iota = _iota_matrix(theta)
    iota_a = [iota(col[0], col[1]) for col in a_basis]
    iota_dinv_a = [iota(col[0], col[1]) for col in dinv_a_basis]

    # full lattice: iota(a) * O; ambient for the coset: iota(d^-1 a) * O^-
    M_full = _module_lattice(alg, iota_a, [list(b) for b in order.basis])
    M_amb = _module_lattice(alg, iota_dinv_a, ominus)
    assert len(M_full) == 4 and len(M_amb) == 2

    # the shift iota(mu~) where mu = mu~ * e1
    mu_rep = mu.rep()
    mu_k = mat_vec(Ainv, list(mu_rep))
    shift = list(iota(mu_k[0], mu_k[1]))

    # one solution x0 in M_amb with x0 - shift in M_full
    cols = [list(c) for c in M_amb] + [[-x for x in c] for c in M_full]
    den = 1
    for colv in cols + [shift]:
        for x in colv:
            den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    Aint = [[int(Fraction(cols[j][i]) * den) for j in range(len(cols))]
            for i in range(4)]
    bint = [int(Fraction(x) * den) for x in shift]
    sol = solve_integer(Aint, bint)
    count = 0
    if sol is not None:
        x0 = [sum(Fraction(sol[j]) * M_amb[j][i] for j in range(2)) for i in range(4)]
        # V_mu = x0 + (M_amb cap M_full); count Q = m with
        # Q(x) = -Q(e1) nrd(x)
        L = lattice_intersection(M_amb, M_full)
        assert len(L) == 2
        scale = -q1  # -Q(e1) > 0; Q_W(x) = -Q(e1) nrd(x)
        gram = []
        for u in L:
            row = []
            for v in L:
                x = scale * _nrd_bilinear(alg, u, v)
                assert Fraction(x).denominator == 1
                row.append(int(x))
            gram.append(row)
        lat = QuadLattice(gram)
        coords = _rational_coords(L, x0)
        count = len(enumerate_coset_vectors(lat, coords, m))
    length = ord_p(p * m, p)
    wc = Fraction(count, K.w) * length
    return CMDegree(m, mu.coords, p, wc,
                    LogLinear.make(0, {p: wc}) if wc else LogLinear.make(0))


def _nrd_bilinear(alg, u, v):
    """trd(u * conj(v)): the bilinear form of the reduced norm."""
    return alg.trd(alg.mul(tuple(u), alg.conj(tuple(v))))


def _rational_coords(basis_cols, v):
    """Coordinates of v in the rational span of the basis columns."""
    n = len(v)
    r = len(basis_cols)
    # solve least-structure: pick r independent rows
    import itertools as _it
    for rows in _it.combinations(range(n), r):
        M = [[Fraction(basis_cols[j][i]) for j in range(r)] for i in rows]
        if det_fraction(M) != 0:
            sol = mat_vec(inverse_fraction(M), [Fraction(v[i]) for i in rows])
            # verify against all coordinates
            for i in range(n):
                got = sum(Fraction(basis_cols[j][i]) * sol[j] for j in range(r))
                assert got == Fraction(v[i])
            return sol
    raise ValueError("vector not in span")
