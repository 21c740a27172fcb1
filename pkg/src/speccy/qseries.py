"""Vector-valued q-expansions graded over the rationals: theta series of
definite lattices, the tautological pairing, extension by zero across a
sublattice splitting, constant-term extraction against an Eisenstein and a
theta table, and formal principal parts of Hejhal-Poincare type.

Exponents are exact Fractions throughout; support laws are congruences
mod Z and would be meaningless in floating point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .lattice import (
    Coset,
    DiscriminantGroup,
    QuadLattice,
    SublatticeEmbedding,
    ball_sweep,
    discriminant_group,
    enumerate_coset_vectors,
    glue_cosets,
)

VARIANT_SUPPORT_SIGN = {"omega": -1, "conjugate": 1, "contragredient": 1}


def rep_number(lattice: QuadLattice, m, mu) -> int:
    """R(m, mu) = #{x in mu + L : Q(x) = m} for positive definite L."""
    m = Fraction(m)
    if m < 0:
        return 0
    return len(enumerate_coset_vectors(lattice, mu, m))


@dataclass
class VVFormQ:
    """Finitely supported vector-valued q-expansion.

    coeffs maps an exponent to the coefficient vector in the coset order of
    the discriminant group (zero coset first, then lexicographic).  cutoff
    records the largest exponent the table is complete up to.
    """

    weight: Fraction
    variant: str
    group: DiscriminantGroup
    coeffs: dict
    cutoff: Fraction

    def __post_init__(self):
        if self.variant not in VARIANT_SUPPORT_SIGN:
            raise ValueError(f"unknown variant {self.variant!r}")

    @property
    def min_exponent(self):
        return min(self.coeffs) if self.coeffs else Fraction(0)

    def coefficient(self, m):
        m = Fraction(m)
        if m in self.coeffs:
            return self.coeffs[m]
        if m <= self.cutoff:
            return tuple(0 for _ in range(self.group.order))
        raise KeyError(f"coefficient at exponent {m} beyond table cutoff {self.cutoff}")

    def check_support(self):
        """Support law and mu -> -mu symmetry of every stored coefficient."""
        sign = VARIANT_SUPPORT_SIGN[self.variant]
        cosets = list(self.group.elements())
        neg_index = {i: self.group.index_of(-c) for i, c in enumerate(cosets)}
        for m, vec in self.coeffs.items():
            for i, c in enumerate(cosets):
                if vec[i] != vec[neg_index[i]]:
                    raise ValueError(f"coefficient at ({m}, {c}) breaks mu -> -mu symmetry")
                if vec[i] != 0:
                    q = self.group.q_map(c)
                    if (m - sign * q) % 1 != 0:
                        raise ValueError(f"support law violated at ({m}, {c})")
        return True

    def evaluate(self, tau):
        """(value vector, certified tail bound) at tau in the upper half
        plane, from the finite table up to the cutoff."""
        v = tau.imag if isinstance(tau, complex) else 0.0
        if v <= 0:
            raise ValueError("tau must lie in the upper half plane")
        n = self.group.order
        out = [0j] * n
        for m, vec in self.coeffs.items():
            qm = cmath.exp(2j * cmath.pi * complex(tau) * float(m))
            for i in range(n):
                if vec[i]:
                    out[i] += complex(vec[i]) * qm
        return out, self.tail_bound(v)

    def tail_bound(self, v):
        return theta_tail_bound(self.group.lattice, self.cutoff, v)


def theta_tail_bound(lattice: QuadLattice, cutoff, v) -> float:
    """Rigorous bound on sum_{m > cutoff} r(m) e^(-2 pi m v) where r(m)
    counts coset vectors of norm m, via the box bound from the enumeration
    radius.  Needs only the Gram data, not a coefficient table."""
    n = lattice.rank
    if n == 0:
        return 0.0
    # Q(x) <= m implies every |x_i| <= sqrt(2 m / lam) for an exact
    # rational lower bound lam on the smallest Gram eigenvalue
    Ginv = lattice.gram_inverse()
    lam = Fraction(1) / max(sum(abs(x) for x in row) for row in Ginv)
    step = Fraction(1, lattice.level())
    total = 0.0
    m = Fraction(cutoff) + step
    t = math.exp(-2 * math.pi * v * float(step))
    for _ in range(100000):
        r = (2 * math.sqrt(float(2 * m / lam)) + 3) ** n
        term = r * math.exp(-2 * math.pi * v * float(m))
        total += term
        m += step
        # once the per-step ratio drops below sqrt(t) the rest is geometric
        r2 = (2 * math.sqrt(float(2 * m / lam)) + 3) ** n
        if r2 * t <= r * math.sqrt(t):
            last = r2 * math.exp(-2 * math.pi * v * float(m))
            total += last / (1 - math.sqrt(t))
            break
    return total * 1.0000001


def theta_series(lattice: QuadLattice, cutoff) -> VVFormQ:
    """Theta series of a positive definite lattice: weight rank/2, variant
    contragredient, coefficients R(m, mu) for all m <= cutoff.

    Computed by one exact sweep over the dual vectors of norm <= cutoff,
    histogrammed by norm and coset.
    """
    cutoff = Fraction(cutoff)
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    if lattice.rank and not lattice.is_positive_definite():
        raise ValueError("theta series requires a positive definite lattice")
    group = discriminant_group(lattice)
    ncosets = group.order
    index = {c.coords: i for i, c in enumerate(group.elements())}
    coeffs = {}
    if lattice.rank == 0:
        coeffs[Fraction(0)] = (1,)
        return VVFormQ(Fraction(0), "contragredient", group, coeffs, cutoff)
    Ginv = lattice.gram_inverse()
    n = lattice.rank
    U = group.snf_U
    orders = group.orders_all
    # dual vectors are x = Ginv k, k integral, with Q(x) = (1/2) k^T Ginv k;
    # the coset coordinates of x are (U k) mod the elementary divisors
    for k, q in ball_sweep(Ginv, [0] * n, cutoff):
        coords = tuple(sum(U[i][j] * int(k[j]) for j in range(n)) % orders[i]
                       for i in range(n))
        idx = index[coords]
        if q not in coeffs:
            coeffs[q] = [0] * ncosets
        coeffs[q][idx] += 1
    coeffs = {m: tuple(vec) for m, vec in coeffs.items()}
    return VVFormQ(Fraction(lattice.rank, 2), "contragredient", group, coeffs, cutoff)


def pair(f: VVFormQ, g: VVFormQ) -> dict:
    """Exponentwise convolution {f, g}(m) = sum <c_f(m1), c_g(m2)> over
    m1 + m2 = m; f lives on the group, g on its dual side."""
    if f.group.lattice.gram != g.group.lattice.gram:
        raise ValueError("discriminant group mismatch")
    out = {}
    for m1, v1 in f.coeffs.items():
        for m2, v2 in g.coeffs.items():
            val = sum(a * b for a, b in zip(v1, v2))
            if val:
                key = m1 + m2
                out[key] = out.get(key, 0) + val
    return {m: v for m, v in sorted(out.items()) if v}


def extend_by_zero(f: VVFormQ, emb: SublatticeEmbedding) -> VVFormQ:
    """View a form on S_L inside S_{L0 + Lambda}: each coefficient vector is
    supported exactly on the glue image of L^vee."""
    L = emb.ambient
    if f.group.lattice.gram != L.gram:
        raise ValueError("form is not defined on the ambient lattice")
    r = len(emb.sub_basis[0]) if emb.sub_basis else 0
    nc = len(emb.complement_basis[0]) if emb.complement_basis else 0
    block = [[0] * (r + nc) for _ in range(r + nc)]
    for i in range(r):
        for j in range(r):
            block[i][j] = emb.sub.gram[i][j]
    for i in range(nc):
        for j in range(nc):
            block[r + i][r + j] = emb.complement.gram[i][j]
    P = QuadLattice(block)
    pgroup = discriminant_group(P)
    pcosets = list(pgroup.elements())
    pindex = {c.coords: i for i, c in enumerate(pcosets)}
    # map each L-coset to the product-group indices of its glue pairs
    lcosets = list(f.group.elements())
    images = []
    disc0 = emb.sub.disc_group()
    discc = emb.complement.disc_group()
    for mu in lcosets:
        pairs = glue_cosets(emb, mu)
        idxs = []
        for mu1, mu2 in pairs:
            vec = list(mu1.rep()) + list(mu2.rep())
            idxs.append(pindex[pgroup.from_vector(vec).coords])
        images.append(idxs)
    coeffs = {}
    for m, vec in f.coeffs.items():
        new = [0] * len(pcosets)
        for i, val in enumerate(vec):
            if val:
                for j in images[i]:
                    new[j] = val
        coeffs[m] = tuple(new)
    return VVFormQ(f.weight, f.variant, pgroup, coeffs, f.cutoff)


@dataclass
class PrincipalPart:
    """Holomorphic principal data of a harmonic form: the finite map
    (m, mu) -> c^+(-m, mu) for m > 0, plus the constant c^+(0, 0).

    Entries are stored as Fractions; is_integral reports whether the
    principal part is integral in the sense required by the main theorem.
    """

    group: DiscriminantGroup
    entries: dict          # {(Fraction m, coset coords tuple): Fraction}
    constant: Fraction = Fraction(0)

    def __post_init__(self):
        norm = {}
        for (m, coords), c in self.entries.items():
            m = Fraction(m)
            if m <= 0:
                raise ValueError("principal part exponents -m require m > 0")
            mu = Coset(self.group, tuple(coords))
            if (m - self.group.q_map(mu)) % 1 != 0:
                raise ValueError(f"support law violated at ({m}, {mu})")
            c = Fraction(c)
            if c:
                norm[(m, mu.coords)] = c
        for (m, coords), c in norm.items():
            neg = Coset(self.group, coords)
            if norm.get((m, (-neg).coords), Fraction(0)) != c:
                raise ValueError("principal part must be symmetric under mu -> -mu")
        self.entries = norm
        self.constant = Fraction(self.constant)

    @property
    def is_integral(self):
        return all(c.denominator == 1 for c in self.entries.values())

    def items(self):
        return sorted(self.entries.items())

    def support_exponents(self):
        return sorted({m for (m, _) in self.entries})


def hejhal_principal_part(m, mu: Coset) -> PrincipalPart:
    """Principal part of the Hejhal-Poincare series: half q^-m at mu and at
    -mu, merged to a single unit entry when mu = -mu."""
    group = mu.group
    m = Fraction(m)
    if m <= 0:
        raise ValueError("m must be positive")
    if (m - group.q_map(mu)) % 1 != 0:
        raise ValueError("support law violated: m must equal Q(mu) mod Z")
    if (-mu).coords == mu.coords:
        entries = {(m, mu.coords): Fraction(1)}
    else:
        entries = {(m, mu.coords): Fraction(1, 2), (m, (-mu).coords): Fraction(1, 2)}
    return PrincipalPart(group, entries)


def constant_term_pairing(pp: PrincipalPart, eis_table, theta: VVFormQ,
                          emb: SublatticeEmbedding):
    """CT {f^+, E (x) Theta} = sum over m1 + m2 + m3 = 0 of
    {c^+(m1), a^+(m2) (x) R(m3)}, as a LogLinear value.

    eis_table is an EisensteinTable over the sublattice; theta lives on the
    orthogonal complement; the pairing runs through the glue description of
    S_L inside S_{L0} (x) S_Lambda.
    """
    from .imq import LogLinear

    total = LogLinear.make(0)
    # m1 = 0 term: only the (0, 0, 0) cell survives since a^+(0, mu != 0) = 0
    # and R(0, mu != 0) = 0
    if pp.constant:
        total = total + eis_table.coefficient(Fraction(0), eis_table.group.zero()) * pp.constant
    glue_cache = {}
    for (m, coords), cval in pp.items():
        mu = Coset(pp.group, coords)
        if coords not in glue_cache:
            glue_cache[coords] = glue_cosets(emb, mu)
        pairs = glue_cache[coords]
        for mu1, mu2 in pairs:
            # m2 + m3 = m with m3 in the theta support of mu2
            q3 = theta.group.q_map(mu2)
            m3 = q3
            while m3 <= m:
                m2 = m - m3
                r = rep_coefficient(theta, m3, mu2)
                if r:
                    a = eis_table.coefficient(m2, mu1)
                    if not a.is_zero():
                        total = total + a * (cval * r)
                m3 += 1
    return total


def rep_coefficient(theta: VVFormQ, m, mu: Coset) -> int:
    """Coefficient R(m, mu) out of a theta table, 0 off the support."""
    m = Fraction(m)
    if m < 0:
        return 0
    vec = theta.coefficient(m)
    return vec[theta.group.index_of(mu)]
