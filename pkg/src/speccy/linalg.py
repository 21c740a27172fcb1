"""Exact integer and rational linear algebra used throughout the package.

Everything here works over Python ints and fractions.Fraction; no floats.
Matrices are lists of lists (row major).  Lattices are given by basis
matrices whose *columns* are the basis vectors.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt


def identity_matrix(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0]) if B else 0
    return [[sum(A[i][t] * B[t][j] for t in range(k)) for j in range(m)] for i in range(n)]


def mat_vec(A, v):
    return [sum(A[i][t] * v[t] for t in range(len(v))) for i in range(len(A))]


def transpose(A):
    return [list(col) for col in zip(*A)] if A else []


def mat_fraction(A):
    return [[Fraction(x) for x in row] for row in A]


def det_fraction(A):
    """Determinant by fraction-free-ish Gaussian elimination (exact)."""
    n = len(A)
    if n == 0:
        return Fraction(1)
    M = [[Fraction(x) for x in row] for row in A]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        inv = Fraction(1) / M[c][c]
        for r in range(c + 1, n):
            if M[r][c] != 0:
                f = M[r][c] * inv
                for j in range(c, n):
                    M[r][j] -= f * M[c][j]
    return det


def inverse_fraction(A):
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(A)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        inv = Fraction(1) / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [row[n:] for row in M]


def solve_fraction(A, b):
    """Solve A x = b over the rationals (A square invertible)."""
    return mat_vec(inverse_fraction(A), b)


# ---------------------------------------------------------------------------
# Integer normal forms


def row_hnf(rows):
    """Row Hermite normal form of the lattice spanned by the given rows.

    Returns the nonzero rows; pivots positive, entries above a pivot reduced
    into [0, pivot).
    """
    M = [list(r) for r in rows]
    if not M:
        return []
    ncols = len(M[0])
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(M)):
            if M[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        # clear below by gcd steps
        for i in range(r + 1, len(M)):
            while M[i][c] != 0:
                q = M[r][c] // M[i][c]
                M[r] = [a - q * b for a, b in zip(M[r], M[i])]
                M[r], M[i] = M[i], M[r]
        if M[r][c] < 0:
            M[r] = [-a for a in M[r]]
        for i in range(r):
            q = M[i][c] // M[r][c]
            if q:
                M[i] = [a - q * b for a, b in zip(M[i], M[r])]
        r += 1
    return [row for row in M[:r]]


def column_hnf(cols_matrix):
    """HNF basis (as columns) of the lattice spanned by the columns."""
    rows = row_hnf(transpose(cols_matrix))
    return transpose(rows) if rows else [[] for _ in cols_matrix]


def snf_with_transforms(A):
    """Smith normal form with transforms: returns (U, V, D) with U A V = D.

    U, V unimodular; D diagonal with d1 | d2 | ... (nonnegative).
    """
    n = len(A)
    m = len(A[0]) if n else 0
    D = [list(r) for r in A]
    U = identity_matrix(n)
    V = identity_matrix(m)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in D:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    t = 0
    while t < min(n, m):
        # find pivot: smallest nonzero |entry| in the remaining block
        piv = None
        best = None
        for i in range(t, n):
            for j in range(t, m):
                if D[i][j] != 0 and (best is None or abs(D[i][j]) < best):
                    best = abs(D[i][j])
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, n):
                if D[i][t] != 0:
                    q = D[i][t] // D[t][t]
                    add_row(i, t, -q)
                    if D[i][t] != 0:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, m):
                if D[t][j] != 0:
                    q = D[t][j] // D[t][t]
                    add_col(j, t, -q)
                    if D[t][j] != 0:
                        swap_cols(t, j)
                        dirty = True
        # divisibility fix-up: d_t must divide every later entry
        for i in range(t + 1, n):
            for j in range(t + 1, m):
                if D[i][j] % D[t][t] != 0:
                    add_row(t, i, 1)
                    dirty = True
                    while dirty:
                        dirty = False
                        for jj in range(t + 1, m):
                            if D[t][jj] != 0:
                                q = D[t][jj] // D[t][t]
                                add_col(jj, t, -q)
                                if D[t][jj] != 0:
                                    # rotate pivot via column swap
                                    swap_cols(t, jj)
                                    dirty = True
                        for ii in range(t + 1, n):
                            if D[ii][t] != 0:
                                q = D[ii][t] // D[t][t]
                                add_row(ii, t, -q)
                                if D[ii][t] != 0:
                                    swap_rows(t, ii)
                                    dirty = True
                    break
            else:
                continue
            break
        else:
            if D[t][t] < 0:
                for j in range(m):
                    D[t][j] = -D[t][j]
                U[t] = [-x for x in U[t]]
            t += 1
            continue
        # divisibility was violated; redo this pivot
        continue
    return U, V, D


def integer_kernel(A):
    """Basis (columns) of {x in Z^m : A x = 0}, saturated."""
    n = len(A)
    m = len(A[0]) if n else 0
    if m == 0:
        return []
    if n == 0:
        return identity_matrix(m)
    U, V, D = snf_with_transforms(A)
    rank = sum(1 for t in range(min(n, m)) if D[t][t] != 0)
    return [[V[i][j] for j in range(rank, m)] for i in range(m)]


def solve_integer(A, b):
    """One integer solution x of A x = b, or None if none exists."""
    n = len(A)
    m = len(A[0]) if n else 0
    U, V, D = snf_with_transforms(A)
    c = mat_vec(U, b)
    y = [0] * m
    for t in range(min(n, m)):
        d = D[t][t]
        if d != 0:
            if c[t] % d != 0:
                return None
            y[t] = c[t] // d
    for t in range(min(n, m), n):
        if c[t] != 0:
            return None
    return mat_vec(V, y)


# ---------------------------------------------------------------------------
# Rational lattices (full or partial rank), columns = generators


def _scale_to_int(cols):
    den = 1
    for col in cols:
        for x in col:
            den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    return [[int(Fraction(x) * den) for x in col] for col in cols], den


def lattice_basis(generators):
    """Canonical basis (list of column vectors) from rational generators."""
    gens = [[Fraction(x) for x in g] for g in generators]
    gens = [g for g in gens if any(x != 0 for x in g)]
    if not gens:
        return []
    n = len(gens[0])
    den = 1
    for g in gens:
        for x in g:
            den = den * x.denominator // gcd(den, x.denominator)
    M = [[int(gens[j][i] * den) for j in range(len(gens))] for i in range(n)]
    H = column_hnf(M)
    basis = []
    for j in range(len(H[0]) if H and H[0] else 0):
        col = [Fraction(H[i][j], den) for i in range(n)]
        if any(x != 0 for x in col):
            basis.append(col)
    return basis


def lattice_member(basis_cols, v):
    """Integer coefficient vector c with basis * c = v, or None."""
    if not basis_cols:
        return [] if all(Fraction(x) == 0 for x in v) else None
    n = len(basis_cols[0])
    den = 1
    for col in basis_cols:
        for x in col:
            den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    A = [[int(Fraction(basis_cols[j][i]) * den) for j in range(len(basis_cols))]
         for i in range(n)]
    b = [int(Fraction(x) * den) for x in v]
    return solve_integer(A, b)


def lattice_intersection(basis1, basis2):
    """Basis of the intersection of two rational lattices (column bases)."""
    if not basis1 or not basis2:
        return []
    n = len(basis1[0])
    den = 1
    for col in basis1 + basis2:
        for x in col:
            den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    A = [[int(Fraction(basis1[j][i]) * den) for j in range(len(basis1))] +
         [-int(Fraction(basis2[j][i]) * den) for j in range(len(basis2))]
         for i in range(n)]
    ker = integer_kernel(A)
    r1 = len(basis1)
    gens = []
    for j in range(len(ker[0]) if ker and ker[0] else 0):
        coeffs = [ker[i][j] for i in range(r1)]
        v = [sum(Fraction(basis1[t][i]) * coeffs[t] for t in range(r1)) for i in range(n)]
        gens.append(v)
    return lattice_basis(gens)


# ---------------------------------------------------------------------------
# Quadratic form utilities


def inertia(G):
    """Signature (n_plus, n_minus, n_zero) of a rational symmetric matrix,
    by exact congruence diagonalization."""
    n = len(G)
    M = [[Fraction(x) for x in row] for row in G]
    plus = minus = zero = 0
    idx = list(range(n))
    while idx:
        # find a nonzero diagonal entry
        d = next((i for i in idx if M[i][i] != 0), None)
        if d is None:
            # all diagonal zero: look for off-diagonal to fold in
            pair = None
            for i in idx:
                for j in idx:
                    if i != j and M[i][j] != 0:
                        pair = (i, j)
                        break
                if pair:
                    break
            if pair is None:
                zero += len(idx)
                break
            i, j = pair
            # congruence x_i -> x_i + x_j makes M[i][i] = 2 M[i][j] != 0
            for t in range(n):
                M[i][t] += M[j][t]
            for t in range(n):
                M[t][i] += M[t][j]
            d = i
        if M[d][d] > 0:
            plus += 1
        else:
            minus += 1
        pivot = M[d][d]
        idx = [i for i in idx if i != d]
        for i in idx:
            if M[i][d] != 0:
                f = M[i][d] / pivot
                for t in range(n):
                    M[i][t] -= f * M[d][t]
                for t in range(n):
                    M[t][i] -= f * M[t][d]
    return plus, minus, zero


def diagonalize_quadratic(G):
    """Rational diagonalization of the quadratic form x^T G x / 2.

    Returns the list of diagonal Q-values [Q(u_1), ..., Q(u_r)] for an
    orthogonal rational basis (zero values omitted require nondegenerate G).
    """
    n = len(G)
    M = [[Fraction(x) for x in row] for row in G]
    basis = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def bil(u, v):
        return sum(u[i] * M0[i][j] * v[j] for i in range(n) for j in range(n))

    M0 = [[Fraction(x) for x in row] for row in G]
    vecs = []
    remaining = list(basis)
    while remaining:
        u = next((v for v in remaining if bil(v, v) != 0), None)
        if u is None:
            # combine two vectors with nonzero pairing
            found = None
            for i in range(len(remaining)):
                for j in range(i + 1, len(remaining)):
                    if bil(remaining[i], remaining[j]) != 0:
                        found = (i, j)
                        break
                if found:
                    break
            if found is None:
                break  # totally isotropic remainder (degenerate form)
            i, j = found
            u = [a + b for a, b in zip(remaining[i], remaining[j])]
        vecs.append(u)
        qu = bil(u, u)
        new_rem = []
        for v in remaining:
            if v is u:
                continue
            f = bil(u, v) / qu
            new_rem.append([a - f * b for a, b in zip(v, u)])
        remaining = [v for v in new_rem if any(x != 0 for x in v)]
    return [bil(u, u) / 2 for u in vecs]


def floor_sqrt_fraction(f):
    """floor(sqrt(f)) for a nonnegative Fraction."""
    f = Fraction(f)
    if f < 0:
        raise ValueError("negative argument")
    return isqrt(f.numerator * f.denominator) // f.denominator


def sqrt_fraction_exact(f):
    """Exact rational square root of f, or None if irrational."""
    f = Fraction(f)
    if f < 0:
        return None
    rn = isqrt(f.numerator)
    rd = isqrt(f.denominator)
    if rn * rn == f.numerator and rd * rd == f.denominator:
        return Fraction(rn, rd)
    return None
