"""The Weil representation attached to an even lattice, acting on the
functions on the discriminant group, together with its conjugate and
contragredient variants.

Conventions.  With sig8 = (p - q) mod 8,

    omega(T)  is diagonal with entry e(-Q(mu)) at mu,
    omega(S)  has (nu, mu) entry e(sig8 / 8) * e([mu, nu]) / sqrt(|D|).

Metaplectic elements are words in the generators S, T, T^-1; the cocycle
is never needed because every computation composes generator matrices.
Matrices carry their power of 1/sqrt(|D|) separately so products of
generators stay exact; comparisons fold the square root in via Gauss sums
when the powers disagree in parity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cyclotomic import CycNum, sqrt_cyclotomic
from .lattice import DiscriminantGroup

VARIANTS = ("omega", "conjugate", "contragredient")

S = "S"
T = "T"
T_INV = "T^-1"
_TOKENS = {S, T, T_INV}


@dataclass(frozen=True)
class MetaWord:
    """A word in the generators of the metaplectic group."""

    word: tuple

    def __post_init__(self):
        for g in self.word:
            if g not in _TOKENS:
                raise ValueError(f"unknown generator {g!r}")

    @classmethod
    def parse(cls, text):
        """Parse e.g. 'S T', 'ST', 'S T^-1' into a word."""
        tokens = []
        i = 0
        text = text.replace(" ", "")
        while i < len(text):
            ch = text[i]
            if ch == "S":
                tokens.append(S)
                i += 1
            elif ch == "T":
                if text[i + 1:i + 4] == "^-1":
                    tokens.append(T_INV)
                    i += 4
                else:
                    tokens.append(T)
                    i += 1
            else:
                raise ValueError(f"cannot parse metaplectic word {text!r}")
        return cls(tuple(tokens))

    def __iter__(self):
        return iter(self.word)

    def __len__(self):
        return len(self.word)


class ScaledMatrix:
    """entries * |D|^(-s/2) with exact cyclotomic entries."""

    def __init__(self, entries, sqrt_power, disc_order):
        self.entries = entries
        self.sqrt_power = sqrt_power
        self.disc_order = disc_order

    @property
    def dim(self):
        return len(self.entries)

    def matmul(self, other):
        assert self.disc_order == other.disc_order
        n = self.dim
        A, B = self.entries, other.entries
        out = [[CycNum() for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for k in range(n):
                a = A[i][k]
                if not a.terms:
                    continue
                for j in range(n):
                    b = B[k][j]
                    if b.terms:
                        out[i][j] = out[i][j] + a * b
        return ScaledMatrix(out, self.sqrt_power + other.sqrt_power, self.disc_order)

    def apply(self, vec):
        n = self.dim
        out = []
        for i in range(n):
            acc = CycNum()
            for j in range(n):
                if self.entries[i][j].terms:
                    acc = acc + self.entries[i][j] * vec[j]
            out.append(acc)
        if self.sqrt_power:
            D = self.disc_order
            # 1/sqrt(D) = sqrt(D)/D, folded exactly into the entries
            factor = sqrt_cyclotomic(D) * Fraction(1, D)
            for _ in range(self.sqrt_power):
                out = [x * factor for x in out]
        return out

    def conjugate(self):
        return ScaledMatrix([[x.conjugate() for x in row] for row in self.entries],
                            self.sqrt_power, self.disc_order)

    def transpose(self):
        n = self.dim
        return ScaledMatrix([[self.entries[j][i] for j in range(n)] for i in range(n)],
                            self.sqrt_power, self.disc_order)

    def scaled_entries(self):
        """Entries with the square-root scale folded in exactly."""
        if not self.sqrt_power:
            return [list(row) for row in self.entries]
        D = self.disc_order
        factor = CycNum.from_rational(1)
        f1 = sqrt_cyclotomic(D) * Fraction(1, D)
        for _ in range(self.sqrt_power):
            factor = factor * f1
        return [[x * factor for x in row] for row in self.entries]

    def __eq__(self, other):
        if not isinstance(other, ScaledMatrix):
            return NotImplemented
        assert self.disc_order == other.disc_order
        if self.dim != other.dim:
            return False
        D = self.disc_order
        diff = self.sqrt_power - other.sqrt_power
        A = self.entries
        B = other.entries
        # value equality: A * D^(-sA/2) == B * D^(-sB/2)
        if diff % 2 == 0:
            scale = Fraction(D) ** (diff // 2)
            return all(A[i][j] == B[i][j] * scale
                       for i in range(self.dim) for j in range(self.dim))
        scale = sqrt_cyclotomic(D) * (Fraction(D) ** ((diff - 1) // 2))
        return all(A[i][j] == B[i][j] * scale
                   for i in range(self.dim) for j in range(self.dim))

    def to_complex(self):
        sc = float(self.disc_order) ** (-self.sqrt_power / 2)
        return [[x.to_complex() * sc for x in row] for row in self.entries]


class WeilRep:
    """omega_L acting on functions on L^vee / L."""

    def __init__(self, disc: DiscriminantGroup):
        self.disc = disc
        self.dim = disc.order
        p, q = disc.lattice.signature
        self.sig8 = (p - q) % 8
        self._cosets = list(disc.elements())
        self._index = {c.coords: i for i, c in enumerate(self._cosets)}
        self._neg = [self._index[(-c).coords] for c in self._cosets]
        self._q = [disc.q_map(c) for c in self._cosets]
        self._b = None
        self._gen_cache = {}

    def cosets(self):
        return list(self._cosets)

    def _bilinear(self, i, j):
        if self._b is None:
            n = self.dim
            self._b = [[self.disc.b_map(self._cosets[i], self._cosets[j])
                        for j in range(n)] for i in range(n)]
        return self._b[i][j]

    def omega_T(self) -> ScaledMatrix:
        """Diagonal matrix with entry e(-Q(mu))."""
        n = self.dim
        ent = [[CycNum() for _ in range(n)] for _ in range(n)]
        for i in range(n):
            ent[i][i] = CycNum.e(-self._q[i])
        return ScaledMatrix(ent, 0, self.dim)

    def omega_S(self) -> ScaledMatrix:
        """(nu, mu) entry e(sig8/8) e([mu, nu]) / sqrt(|D|)."""
        n = self.dim
        root8 = CycNum.e(Fraction(self.sig8, 8))
        ent = [[root8 * CycNum.e(self._bilinear(j, i)) for j in range(n)]
               for i in range(n)]
        return ScaledMatrix(ent, 1, self.dim)

    def omega_Z(self) -> ScaledMatrix:
        """The center: phi_mu -> e(sig8/4) phi_{-mu}."""
        n = self.dim
        root4 = CycNum.e(Fraction(self.sig8, 4))
        ent = [[CycNum() for _ in range(n)] for _ in range(n)]
        for j in range(n):
            ent[self._neg[j]][j] = root4
        return ScaledMatrix(ent, 0, self.dim)

    def generator_matrix(self, token, variant="omega") -> ScaledMatrix:
        if variant not in VARIANTS:
            raise ValueError(f"unknown representation variant {variant!r}")
        key = (token, variant)
        if key not in self._gen_cache:
            if token == S:
                M = self.omega_S()
            elif token == T:
                M = self.omega_T()
            elif token == T_INV:
                M = self.omega_T().conjugate()  # diagonal unitary: inverse = conjugate
            else:
                raise ValueError(f"unknown generator {token!r}")
            if variant in ("conjugate", "contragredient"):
                # contragredient = inverse transpose = entrywise conjugate for
                # unitary generator matrices; the conjugate variant has the
                # same matrices, acting on the dual space
                M = M.conjugate()
            self._gen_cache[key] = M
        return self._gen_cache[key]

    def rep_matrix(self, word, variant="omega") -> ScaledMatrix:
        """Matrix of the word g1 g2 ... gr: product of generator matrices."""
        if isinstance(word, MetaWord):
            word = word.word
        n = self.dim
        ent = [[CycNum.from_rational(int(i == j)) for j in range(n)] for i in range(n)]
        out = ScaledMatrix(ent, 0, self.dim)
        for g in word:
            out = out.matmul(self.generator_matrix(g, variant))
        return out

    def apply(self, variant, word, vec):
        """Apply the representation of a word to a vector of length dim.

        Entries may be ints, Fractions, or CycNums; the result is a list of
        CycNums with all square-root scales folded in exactly.
        """
        if variant not in VARIANTS:
            raise ValueError(f"unknown representation variant {variant!r}")
        if len(vec) != self.dim:
            raise ValueError("vector length does not match discriminant group order")
        out = [x if isinstance(x, CycNum) else CycNum.from_rational(x) for x in vec]
        if isinstance(word, MetaWord):
            word = word.word
        for g in reversed(word):
            # rightmost generator acts first
            M = self.generator_matrix(g, variant)
            out = M.apply(out)
        return out

    def level(self):
        return self.disc.lattice.level()
