"""Integral quadratic lattices: Gram data, discriminant groups, duals,
maximality, orthogonal complements, and exact vector enumeration.

Conventions.  A lattice is stored through the Gram matrix of its *bilinear*
form [x, y], so [x, x] = 2 Q(x) and all entries are integers with even
diagonal.  Vectors are coordinate tuples with respect to the lattice basis;
dual vectors are rational coordinate tuples in the same basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .linalg import (
    det_fraction,
    floor_sqrt_fraction,
    identity_matrix,
    inertia,
    integer_kernel,
    inverse_fraction,
    mat_mul,
    mat_vec,
    snf_with_transforms,
    sqrt_fraction_exact,
    transpose,
)


class DegenerateLatticeError(ValueError):
    pass


class QuadLattice:
    """An integral lattice with even Gram matrix (rank 0 allowed)."""

    def __init__(self, gram, name=None):
        gram = [[int(x) for x in row] for row in gram]
        n = len(gram)
        for i, row in enumerate(gram):
            if len(row) != n:
                raise ValueError("gram matrix must be square")
            if row[i] % 2 != 0:
                raise ValueError("gram diagonal must be even (Q must be Z-valued)")
            for j in range(n):
                if gram[i][j] != gram[j][i]:
                    raise ValueError("gram matrix must be symmetric")
        self.gram = tuple(tuple(row) for row in gram)
        self.rank = n
        self.name = name
        self._disc_group = None
        d = det_fraction(gram) if n else Fraction(1)
        self.det = int(d)
        p, q, z = inertia(gram) if n else (0, 0, 0)
        if z:
            self.signature = (p, q)
            self._degenerate = True
        else:
            self.signature = (p, q)
            self._degenerate = False

    def __repr__(self):
        return f"QuadLattice(rank={self.rank}, det={self.det}, signature={self.signature})"

    def __eq__(self, other):
        return isinstance(other, QuadLattice) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    @property
    def is_degenerate(self):
        return self._degenerate

    @property
    def disc(self):
        """|det(gram)|; the sign is available separately via det."""
        return abs(self.det)

    def bilinear(self, x, y):
        return sum(Fraction(x[i]) * self.gram[i][j] * Fraction(y[j])
                   for i in range(self.rank) for j in range(self.rank))

    def quadratic(self, x):
        return self.bilinear(x, x) / 2

    def is_positive_definite(self):
        return self.signature == (self.rank, 0) and not self._degenerate

    def is_negative_definite(self):
        return self.signature == (0, self.rank) and not self._degenerate

    def gram_inverse(self):
        if self._degenerate:
            raise DegenerateLatticeError("degenerate lattice")
        return inverse_fraction(self.gram) if self.rank else []

    def level(self):
        """Smallest N with N * Q(mu) integral for every dual vector mu."""
        if self.rank == 0:
            return 1
        Ginv = self.gram_inverse()
        N = 1
        for i in range(self.rank):
            for j in range(self.rank):
                d = Ginv[i][j].denominator
                if i == j:
                    d = (Ginv[i][j] / 2).denominator
                N = N * d // gcd(N, d)
        return N

    def disc_group(self):
        if self._disc_group is None:
            self._disc_group = DiscriminantGroup(self)
        return self._disc_group


@dataclass(frozen=True)
class Coset:
    """Element of L^vee / L, normalized to elementary-divisor coordinates."""

    group: "DiscriminantGroup"
    coords: tuple

    def rep(self):
        """Canonical rational representative in the lattice basis,
        with every coordinate reduced into [0, 1)."""
        g = self.group
        n = g.lattice.rank
        v = [Fraction(0)] * n
        for a, gen in zip(self.coords, g.generators_all):
            for i in range(n):
                v[i] += a * gen[i]
        return tuple(x - (x.numerator // x.denominator) for x in v)

    def __neg__(self):
        g = self.group
        return Coset(g, tuple((-a) % d for a, d in zip(self.coords, g.orders_all)))

    def __add__(self, other):
        if other.group is not self.group:
            raise ValueError("cosets from different discriminant groups")
        g = self.group
        return Coset(g, tuple((a + b) % d for a, b, d in
                              zip(self.coords, other.coords, g.orders_all)))

    def is_zero(self):
        return all(a == 0 for a in self.coords)

    def order(self):
        o = 1
        for a, d in zip(self.coords, self.group.orders_all):
            if a:
                k = d // gcd(a, d)
                o = o * k // gcd(o, k)
        return o

    def q(self):
        return self.group.q_map(self)

    def __repr__(self):
        return f"Coset{self.visible_coords()}"

    def visible_coords(self):
        g = self.group
        return tuple(a for a, d in zip(self.coords, g.orders_all) if d > 1)


class DiscriminantGroup:
    """The finite quadratic module L^vee / L, via Smith normal form of gram."""

    def __init__(self, lattice: QuadLattice):
        if lattice.is_degenerate:
            raise DegenerateLatticeError("degenerate lattice")
        self.lattice = lattice
        n = lattice.rank
        if n == 0:
            self.orders_all = ()
            self.generators_all = ()
            self.snf_U = ()
        else:
            U, V, D = snf_with_transforms([list(r) for r in lattice.gram])
            orders = []
            gens = []
            for i in range(n):
                d = D[i][i]
                orders.append(d)
                # generator: (1/d) * (column i of V), an element of L^vee
                col = [Fraction(V[t][i], d) for t in range(n)]
                gens.append(tuple(col))
            self.orders_all = tuple(orders)
            self.generators_all = tuple(gens)
            # G^{-1} k = sum_i (U k)_i g_i: U classifies dual vectors by coset
            self.snf_U = tuple(tuple(row) for row in U)
        self.order = 1
        for d in self.orders_all:
            self.order *= abs(d)
        assert self.order == lattice.disc
        self._gen_matrix_inv = None

    @property
    def elementary_divisors(self):
        return tuple(d for d in self.orders_all if d > 1)

    @property
    def generators(self):
        return tuple(g for g, d in zip(self.generators_all, self.orders_all) if d > 1)

    def zero(self):
        return Coset(self, tuple(0 for _ in self.orders_all))

    def from_coords(self, coords):
        """Coset from coordinates in the visible (nontrivial) generators."""
        coords = list(coords)
        full = []
        it = iter(coords)
        for d in self.orders_all:
            full.append(next(it) % d if d > 1 else 0)
        return Coset(self, tuple(full))

    def from_vector(self, v):
        """Coset of a rational vector v in L^vee (lattice-basis coordinates)."""
        lat = self.lattice
        n = lat.rank
        v = [Fraction(x) for x in v]
        # membership in the dual: pairing with every basis vector is integral
        for i in range(n):
            pairing = sum(Fraction(lat.gram[i][j]) * v[j] for j in range(n))
            if pairing.denominator != 1:
                raise ValueError("vector is not in the dual lattice")
        if n == 0:
            return self.zero()
        # coordinates: v = sum a_i g_i with g_i the SNF generators
        if self._gen_matrix_inv is None:
            cols = [list(g) for g in self.generators_all]
            self._gen_matrix_inv = inverse_fraction(transpose(cols))
        sol = mat_vec(self._gen_matrix_inv, v)
        coords = []
        for a, d in zip(sol, self.orders_all):
            ai = Fraction(a)
            if ai.denominator != 1:
                raise ValueError("vector is not in the dual lattice")
            coords.append(int(ai) % d)
        return Coset(self, tuple(coords))

    def elements(self):
        """All cosets, ordered lexicographically by visible coordinates
        (the zero coset always comes first)."""
        ranges = [range(d) if d > 1 else range(1) for d in self.orders_all]
        for coords in itertools.product(*ranges):
            yield Coset(self, coords)

    def coset_by_index(self, k):
        for i, c in enumerate(self.elements()):
            if i == k:
                return c
        raise IndexError("coset index out of range")

    def index_of(self, coset):
        for i, c in enumerate(self.elements()):
            if c == coset:
                return i
        raise ValueError("coset not in group")

    def q_map(self, coset):
        """Q(mu) mod Z, as a Fraction in [0, 1)."""
        q = self.lattice.quadratic(coset.rep())
        return q - (q.numerator // q.denominator)

    def b_map(self, c1, c2):
        """[mu, nu] mod Z, as a Fraction in [0, 1)."""
        b = self.lattice.bilinear(c1.rep(), c2.rep())
        return b - (b.numerator // b.denominator)


def discriminant_group(lattice: QuadLattice) -> DiscriminantGroup:
    """L^vee / L with its torsion quadratic form."""
    return lattice.disc_group()


def is_maximal(lattice: QuadLattice) -> bool:
    """True iff L admits no proper integral overlattice.

    L + Zx is integral exactly when x lies in L^vee and Q(x) is integral,
    so maximality amounts to anisotropy of the discriminant form.
    """
    group = lattice.disc_group()
    for mu in group.elements():
        if not mu.is_zero() and group.q_map(mu) == 0:
            return False
    return True


@dataclass
class SublatticeEmbedding:
    """A direct summand L0 of L together with its orthogonal complement."""

    ambient: QuadLattice
    sub_basis: tuple          # columns, integer coordinates in ambient basis
    sub: QuadLattice
    complement_basis: tuple   # columns, integer coordinates in ambient basis
    complement: QuadLattice
    index: int                # [L : L0 + Lambda]

    def __post_init__(self):
        d_sub = self.sub.disc
        d_comp = self.complement.disc
        assert d_sub * d_comp == self.ambient.disc * self.index ** 2


def orthogonal_complement(lattice: QuadLattice, sub_basis) -> SublatticeEmbedding:
    """Saturated orthogonal complement of a direct summand, with glue index."""
    n = lattice.rank
    S = [[int(x) for x in row] for row in sub_basis]  # n x r
    r = len(S[0]) if S and S[0] else 0
    if r:
        U, V, D = snf_with_transforms(S)
        divisors = [D[t][t] for t in range(min(len(D), r)) if t < r]
        if any(abs(d) != 1 for d in divisors[:r]) or len([d for d in divisors if d != 0]) < r:
            raise ValueError("non-primitive sublattice")
    sub_gram = mat_mul(mat_mul(transpose(S), [list(row) for row in lattice.gram]), S) if r else []
    sub = QuadLattice([[int(x) for x in row] for row in sub_gram])
    if r and sub.is_degenerate:
        raise ValueError("non-primitive sublattice")  # degenerate summand unsupported
    # complement: integer kernel of S^T G
    StG = mat_mul(transpose(S), [list(row) for row in lattice.gram]) if r else []
    C = integer_kernel(StG) if r else identity_matrix(n)
    ncomp = len(C[0]) if C and C[0] else 0
    comp_gram = mat_mul(mat_mul(transpose(C), [list(row) for row in lattice.gram]), C) if ncomp else []
    comp = QuadLattice([[int(x) for x in row] for row in comp_gram])
    # glue index [L : L0 + Lambda]
    if r + ncomp != n:
        raise ValueError("non-primitive sublattice")
    J = [[S[i][j] for j in range(r)] + [C[i][j] for j in range(ncomp)] for i in range(n)]
    index = abs(int(det_fraction(J))) if n else 1
    return SublatticeEmbedding(lattice, tuple(map(tuple, S)) if r else (),
                               sub, tuple(map(tuple, C)) if ncomp else (), comp, index)


def glue_cosets(emb: SublatticeEmbedding, mu: Coset):
    """Representatives of (mu + L) / (L0 + Lambda) as coset pairs
    (mu1, mu2) in (L0^vee/L0) x (Lambda^vee/Lambda).  Length = glue index."""
    L = emb.ambient
    n = L.rank
    r = len(emb.sub_basis[0]) if emb.sub_basis else 0
    nc = len(emb.complement_basis[0]) if emb.complement_basis else 0
    disc0 = emb.sub.disc_group()
    discc = emb.complement.disc_group()
    # representatives of L / (L0 + Lambda)
    J = [[emb.sub_basis[i][j] for j in range(r)] +
         [emb.complement_basis[i][j] for j in range(nc)] for i in range(n)]
    U, V, D = snf_with_transforms(J)
    Uinv = inverse_fraction(U)
    reps = []
    ranges = [range(abs(D[t][t])) for t in range(n)]
    for coords in itertools.product(*ranges):
        # representative of the quotient Z^n / J Z^n pulled back through U
        w = mat_vec(Uinv, list(coords))
        reps.append([Fraction(x) for x in w])
    Jinv = inverse_fraction(J)
    mu_rep = list(mu.rep())
    pairs = []
    for rep in reps:
        v = [mu_rep[i] + rep[i] for i in range(n)]
        coeffs = mat_vec(Jinv, v)
        x0 = coeffs[:r]
        x1 = coeffs[r:]
        mu1 = disc0.from_vector(x0) if r else disc0.zero()
        mu2 = discc.from_vector(x1) if nc else discc.zero()
        pairs.append((mu1, mu2))
    # dedupe (SNF reps are exact coset representatives, so this is a no-op
    # safeguard) and order deterministically
    seen = {}
    for p in pairs:
        key = (p[0].coords, p[1].coords)
        seen[key] = p
    out = [seen[k] for k in sorted(seen)]
    assert len(out) == emb.index
    return out


def enumerate_coset_vectors(lattice: QuadLattice, mu, m) -> list:
    """All x in mu + L with Q(x) = m, for positive definite L.

    mu may be a Coset or a rational coordinate vector; vectors are returned
    as tuples of Fractions in the lattice basis, lexicographically sorted.
    """
    m = Fraction(m)
    if lattice.rank and not lattice.is_positive_definite():
        raise ValueError("enumeration requires definite lattice")
    if m < 0:
        return []
    if isinstance(mu, Coset):
        shift = list(mu.rep())
    else:
        shift = [Fraction(x) for x in mu]
    n = lattice.rank
    if n == 0:
        return [()] if m == 0 else []
    # exact LDL^T: 2Q(x) = sum_i d[i] * (x_i + sum_{j>i} r[i][j] x_j)^2
    A = [[Fraction(x) for x in row] for row in lattice.gram]
    d = [Fraction(0)] * n
    R = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = A[i][i]
        for j in range(i + 1, n):
            R[i][j] = A[i][j] / d[i]
        for k in range(i + 1, n):
            for l in range(i + 1, n):
                A[k][l] -= A[k][i] * A[i][l] / A[i][i]
    target = 2 * m
    results = []
    x = [Fraction(0)] * n

    def rec(i, budget):
        # x[i+1:] fixed; assign x[i] = shift[i] + t, t integer
        center = sum(R[i][j] * x[j] for j in range(i + 1, n))
        c0 = shift[i] + center
        if i == 0:
            # solve d[0] * (c0 + t)^2 == budget exactly
            if budget < 0:
                return
            root = sqrt_fraction_exact(budget / d[0])
            if root is None:
                return
            for r in {root, -root}:
                t = r - c0
                if t.denominator == 1:
                    x[0] = shift[0] + t
                    results.append(tuple(x))
            return
        # integer t with (c0 + t)^2 <= budget / d[i]
        val = budget / d[i]
        s = floor_sqrt_fraction(val)
        start = -s - c0
        t = start.numerator // start.denominator - 1
        while True:
            t += 1
            z = c0 + t
            if z * z <= val:
                x[i] = shift[i] + t
                rec(i - 1, budget - d[i] * z * z)
            elif z > 0:
                break
    rec(n - 1, target)
    return sorted(results)


def ball_sweep(gram, shift, bound):
    """All x = shift + t, t integral, with (1/2) x^T gram x <= bound, for a
    rational symmetric positive definite gram.  Yields (x, Q(x)) pairs.

    Exact rational arithmetic; used for bulk theta sweeps where one walk
    over the ball replaces one enumeration per coset.
    """
    n = len(gram)
    bound = Fraction(bound)
    if n == 0:
        return [((), Fraction(0))] if bound >= 0 else []
    A = [[Fraction(x) for x in row] for row in gram]
    d = [Fraction(0)] * n
    R = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = A[i][i]
        if d[i] <= 0:
            raise ValueError("ball sweep requires positive definite gram")
        for j in range(i + 1, n):
            R[i][j] = A[i][j] / d[i]
        for k in range(i + 1, n):
            for l in range(i + 1, n):
                A[k][l] -= A[k][i] * A[i][l] / A[i][i]
    shift = [Fraction(x) for x in shift]
    x = [Fraction(0)] * n
    out = []

    def rec(i, budget):
        center = sum(R[i][j] * x[j] for j in range(i + 1, n))
        c0 = shift[i] + center
        val = budget / d[i]
        s = floor_sqrt_fraction(val)
        start = -s - c0
        t = start.numerator // start.denominator - 1
        while True:
            t += 1
            z = c0 + t
            zz = z * z
            if zz <= val:
                x[i] = shift[i] + t
                rem = budget - d[i] * zz
                if i == 0:
                    out.append((tuple(x), bound - rem / 2))
                else:
                    rec(i - 1, rem)
            elif z > 0:
                break
    rec(n - 1, 2 * bound)
    return out


@dataclass(frozen=True)
class CliffordDiscriminant:
    value: int
    is_fundamental: bool
    is_odd: bool


def is_fundamental_discriminant(d: int) -> bool:
    if d == 1:
        return True
    if d % 4 == 1:
        return _squarefree(d)
    if d % 4 == 0:
        q = d // 4
        return q % 4 in (2, 3) and _squarefree(q)
    return False


def _squarefree(n):
    n = abs(n)
    if n == 0:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def even_clifford_binary(lattice: QuadLattice) -> CliffordDiscriminant:
    """Discriminant of the even Clifford order Z[e1 e2] of a negative
    definite binary lattice: (e1 e2)^2 = [e1,e2] e1e2 - Q(e1) Q(e2)."""
    if lattice.rank != 2 or not lattice.is_negative_definite():
        raise ValueError("even Clifford discriminant requires a negative definite binary lattice")
    b = lattice.gram[0][1]
    q1 = lattice.gram[0][0] // 2
    q2 = lattice.gram[1][1] // 2
    d = b * b - 4 * q1 * q2
    return CliffordDiscriminant(d, is_fundamental_discriminant(d), d % 2 != 0)
