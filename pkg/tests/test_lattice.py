import random
from fractions import Fraction

import pytest

from speccy.lattice import (
    Coset,
    QuadLattice,
    discriminant_group,
    enumerate_coset_vectors,
    even_clifford_binary,
    glue_cosets,
    is_maximal,
    orthogonal_complement,
)

L0_D7 = QuadLattice([[-2, -1], [-1, -4]])
A1 = QuadLattice([[2]])
A2 = QuadLattice([[2, 1], [1, 2]])
U_HYP = QuadLattice([[0, 1], [1, 0]])


def brute_count(lat, mu_rep, m):
    """Independent oracle: exhaustive search over the coordinate box of
    radius ceil(sqrt(m / lambda_min)) + 1."""
    n = lat.rank
    if n == 0:
        return 1 if m == 0 else 0
    # crude rational lower bound on the smallest eigenvalue via diag dominance
    # fallback: lambda_min >= 1 / max row sum of |G^{-1}| entries
    Ginv = lat.gram_inverse()
    bound = max(sum(abs(x) for x in row) for row in Ginv)
    lam = Fraction(1, 1) / bound
    radius = int((Fraction(2 * m) / lam) ** Fraction(1, 1)) + 2
    r = 1
    while r * r < (2 * Fraction(m) / lam):
        r += 1
    r += 1
    count = 0
    from itertools import product
    ranges = []
    for i in range(n):
        c = Fraction(mu_rep[i])
        lo = -(c.numerator // c.denominator) - r - 1
        ranges.append(range(lo, lo + 2 * r + 3))
    for t in product(*ranges):
        x = [Fraction(mu_rep[i]) + t[i] for i in range(n)]
        if lat.quadratic(x) == m:
            count += 1
    return count


class TestDiscriminantGroup:
    def test_rank_one(self):
        g = discriminant_group(QuadLattice([[2]]))
        assert g.elementary_divisors == (2,)
        half = g.from_vector([Fraction(1, 2)])
        assert g.q_map(half) == Fraction(1, 4)

    def test_d7(self):
        g = discriminant_group(L0_D7)
        assert g.elementary_divisors == (7,)
        assert g.order == 7

    def test_unimodular_trivial(self):
        g = discriminant_group(U_HYP)
        assert g.order == 1
        assert g.elementary_divisors == ()

    def test_order_equals_det(self):
        rng = random.Random(11)
        for _ in range(20):
            n = rng.randint(1, 3)
            while True:
                B = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
                G = [[2 * sum(B[k][i] * B[k][j] for k in range(n)) for j in range(n)]
                     for i in range(n)]
                lat = QuadLattice(G)
                if lat.det != 0:
                    break
            assert discriminant_group(lat).order == lat.disc

    def test_q_symmetry_and_b_map(self):
        g = discriminant_group(L0_D7)
        for mu in g.elements():
            assert g.q_map(mu) == g.q_map(-mu)
            for nu in g.elements():
                lhs = g.b_map(mu, nu)
                rhs = (g.q_map(mu + nu) - g.q_map(mu) - g.q_map(nu)) % 1
                assert lhs == rhs

    def test_singular_rejected(self):
        lat = QuadLattice([[2, 2], [2, 2]])
        with pytest.raises(Exception):
            discriminant_group(lat)


class TestMaximal:
    def test_a1(self):
        assert is_maximal(QuadLattice([[2]]))

    def test_scaled(self):
        assert not is_maximal(QuadLattice([[8]]))

    def test_d7(self):
        assert is_maximal(L0_D7)

    def test_unimodular(self):
        assert is_maximal(U_HYP)


class TestEnumeration:
    def test_zero_vector(self):
        g = discriminant_group(A1)
        assert enumerate_coset_vectors(A1, g.zero(), 0) == [(0,)]

    def test_half_coset(self):
        g = discriminant_group(A1)
        mu = g.from_vector([Fraction(1, 2)])
        vecs = enumerate_coset_vectors(A1, mu, Fraction(1, 4))
        assert vecs == [(Fraction(-1, 2),), (Fraction(1, 2),)]

    def test_a2_six_roots(self):
        g = discriminant_group(A2)
        vecs = enumerate_coset_vectors(A2, g.zero(), 1)
        assert len(vecs) == 6

    def test_empty_unless_support(self):
        g = discriminant_group(A1)
        mu = g.from_vector([Fraction(1, 2)])
        # q(mu) = 1/4, so Q(x) = 1 is impossible on the coset
        assert enumerate_coset_vectors(A1, mu, 1) == []

    def test_indefinite_rejected(self):
        with pytest.raises(ValueError):
            enumerate_coset_vectors(U_HYP, [0, 0], 1)

    def test_rank4_count_vs_box_search(self):
        rng = random.Random(41)
        B = [[rng.randint(-1, 1) for _ in range(4)] for _ in range(4)]
        for i in range(4):
            B[i][i] += 2
        G = [[2 * sum(B[k][i] * B[k][j] for k in range(4)) for j in range(4)]
             for i in range(4)]
        lat = QuadLattice(G)
        assert lat.is_positive_definite()
        grp = discriminant_group(lat)
        mu = list(grp.elements())[min(1, grp.order - 1)]
        for k in (7, 20):
            m = grp.q_map(mu) + k
            assert len(enumerate_coset_vectors(lat, mu, m)) == brute_count(lat, mu.rep(), m)

    def test_negation_symmetry_and_bruteforce(self):
        rng = random.Random(5)
        for _ in range(8):
            n = rng.randint(1, 3)
            while True:
                B = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
                G = [[2 * sum(B[k][i] * B[k][j] for k in range(n)) for j in range(n)]
                     for i in range(n)]
                for i in range(n):
                    G[i][i] += 2
                lat = QuadLattice(G)
                if lat.is_positive_definite():
                    break
            grp = discriminant_group(lat)
            cosets = list(grp.elements())
            mu = cosets[rng.randrange(len(cosets))]
            for k in range(4):
                m = grp.q_map(mu) + k
                vs = enumerate_coset_vectors(lat, mu, m)
                vs_neg = enumerate_coset_vectors(lat, -mu, m)
                assert len(vs) == len(vs_neg)
                assert len(vs) == brute_count(lat, mu.rep(), m)


class TestComplement:
    def test_block_split(self):
        G = [[-2, -1, 0], [-1, -4, 0], [0, 0, 2]]
        L = QuadLattice(G)
        emb = orthogonal_complement(L, [[1, 0], [0, 1], [0, 0]])
        assert emb.complement.gram == ((2,),)
        assert emb.index == 1

    def test_full_sublattice(self):
        emb = orthogonal_complement(A2, [[1, 0], [0, 1]])
        assert emb.complement.rank == 0
        assert emb.index == 1

    def test_non_primitive_rejected(self):
        with pytest.raises(ValueError):
            orthogonal_complement(A2, [[2], [0]])

    def test_disc_identity_random(self):
        rng = random.Random(7)
        for _ in range(10):
            n = 3
            while True:
                B = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
                G = [[2 * sum(B[k][i] * B[k][j] for k in range(n)) for j in range(n)]
                     for i in range(n)]
                for i in range(n):
                    G[i][i] += 4
                lat = QuadLattice(G)
                if not lat.is_degenerate:
                    break
            # primitive vector as sublattice
            while True:
                v = [rng.randint(-2, 2) for _ in range(n)]
                from math import gcd
                g = 0
                for x in v:
                    g = gcd(g, x)
                if g == 1 and lat.quadratic(v) != 0:
                    break
            emb = orthogonal_complement(lat, [[x] for x in v])
            assert emb.sub.disc * emb.complement.disc == lat.disc * emb.index ** 2


def build_glued_index7():
    """L = (L0 + Lambda) + Z*glue inside the rational span, glue of order 7.

    Returns (L, sub_basis of L0 in L-coordinates).
    """
    from speccy.linalg import inverse_fraction, lattice_basis, mat_vec
    G0 = [[-2, -1], [-1, -4]]
    GL = [[2, 1], [1, 4]]
    GP = [[G0[0][0], G0[0][1], 0, 0],
          [G0[1][0], G0[1][1], 0, 0],
          [0, 0, GL[0][0], GL[0][1]],
          [0, 0, GL[1][0], GL[1][1]]]
    glue = [Fraction(-4, 7), Fraction(1, 7), Fraction(4, 7), Fraction(-1, 7)]
    gens = [[Fraction(int(i == j)) for i in range(4)] for j in range(4)] + [glue]
    basis = lattice_basis(gens)  # columns in P-coordinates
    B = [[basis[j][i] for j in range(4)] for i in range(4)]
    gram = [[0] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(4):
            val = sum(Fraction(B[a][i]) * GP[a][b] * Fraction(B[b][j])
                      for a in range(4) for b in range(4))
            assert val.denominator == 1
            gram[i][j] = int(val)
    L = QuadLattice(gram)
    Binv = inverse_fraction(B)
    sub = []
    for col in ([1, 0, 0, 0], [0, 1, 0, 0]):
        c = mat_vec(Binv, col)
        assert all(Fraction(x).denominator == 1 for x in c)
        sub.append([int(x) for x in c])
    sub_basis = [[sub[j][i] for j in range(2)] for i in range(4)]
    return L, sub_basis


class TestGlue:
    def test_block_identity(self):
        G = [[-2, -1, 0], [-1, -4, 0], [0, 0, 2]]
        L = QuadLattice(G)
        emb = orthogonal_complement(L, [[1, 0], [0, 1], [0, 0]])
        g = discriminant_group(L)
        zero_pairs = glue_cosets(emb, g.zero())
        assert len(zero_pairs) == 1
        mu1, mu2 = zero_pairs[0]
        assert mu1.is_zero() and mu2.is_zero()

    def test_glued_index7(self):
        L, sub_basis = build_glued_index7()
        assert abs(L.det) == 1
        assert L.signature == (2, 2)
        emb = orthogonal_complement(L, sub_basis)
        assert emb.index == 7
        assert emb.sub.disc == 7 and emb.complement.disc == 7
        assert emb.sub.disc * emb.complement.disc == L.disc * emb.index ** 2
        pairs = glue_cosets(emb, discriminant_group(L).zero())
        assert len(pairs) == 7
        firsts = {p[0].coords for p in pairs}
        assert len(firsts) == 7
        assert any(p[0].is_zero() and p[1].is_zero() for p in pairs)


class TestCliffordDiscriminant:
    def clifford_square(self, lat):
        """Oracle: multiply e1 e2 e1 e2 in the rank-4 Clifford algebra with
        basis (1, e1, e2, e1e2) and read off trace and norm of w = e1 e2."""
        b = lat.gram[0][1]
        q1 = lat.gram[0][0] // 2
        q2 = lat.gram[1][1] // 2
        # e2 e1 = b - e1 e2; w^2 = e1 (b - e1 e2) e2 = b w - q1 q2
        trace, norm = b, q1 * q2
        return trace * trace - 4 * norm

    def test_d7(self):
        res = even_clifford_binary(L0_D7)
        assert res.value == -7
        assert res.value == self.clifford_square(L0_D7)
        assert res.is_fundamental and res.is_odd

    def test_d4(self):
        lat = QuadLattice([[-2, 0], [0, -2]])
        res = even_clifford_binary(lat)
        assert res.value == -4 == self.clifford_square(lat)
        assert res.is_fundamental and not res.is_odd

    def test_d12(self):
        lat = QuadLattice([[-4, -2], [-2, -4]])
        res = even_clifford_binary(lat)
        assert res.value == -12 == self.clifford_square(lat)
        assert not res.is_fundamental

    def test_requires_negative_definite(self):
        with pytest.raises(ValueError):
            even_clifford_binary(A2)
