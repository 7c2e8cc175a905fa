"""Finitely generated nondegenerate subgroups of Q^l and their symmetries.

A lattice is stored through a canonical basis: the Hermite normal form of
the integer matrix obtained by clearing denominators, scaled back down.
Two generator lists spanning the same subgroup therefore produce identical
``basis`` fields, so lattice equality is plain data equality.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from . import linalg
from .errors import (
    BlockShapeViolation,
    DimensionMismatch,
    EmptyGenerators,
    NondegenerateViolation,
    NotMember,
    SingularBasis,
    SingularMatrix,
)
from .rationals import as_fraction, rational_str, vector_strs


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class Lattice:
    """A rank-l subgroup of Q^l with a canonical Z-basis (rows of ``basis``)."""

    __slots__ = ("ambient_dim", "generators", "basis", "denominator",
                 "_inverse", "_ambient_cache")

    def __init__(self, ambient_dim: int, generators):
        if ambient_dim < 1:
            raise DimensionMismatch("ambient dimension must be positive")
        gens = tuple(tuple(as_fraction(x) for x in g) for g in generators)
        if not gens:
            raise EmptyGenerators("at least one generator is required")
        for g in gens:
            if len(g) != ambient_dim:
                raise DimensionMismatch(
                    f"generator {g} does not have length {ambient_dim}")
        scale = 1
        for g in gens:
            for x in g:
                scale = _lcm(scale, x.denominator)
        integer_rows = [[int(x * scale) for x in g] for g in gens]
        hnf = linalg.hermite_normal_form(integer_rows)
        if len(hnf) < ambient_dim:
            raise NondegenerateViolation(
                f"generators span a subspace of rank {len(hnf)} < {ambient_dim}")
        basis = tuple(tuple(Fraction(x, scale) for x in row) for row in hnf)
        denominator = 1
        for row in basis:
            for x in row:
                denominator = _lcm(denominator, x.denominator)
        self.ambient_dim = ambient_dim
        self.generators = gens
        self.basis = basis
        self.denominator = denominator
        self._inverse = None
        self._ambient_cache = {}

    @property
    def basis_inverse(self):
        if self._inverse is None:
            self._inverse = linalg.mat_inverse(self.basis)
        return self._inverse

    def coordinates(self, v):
        """Integer coordinates n with n . basis = v, or None when v is not in the lattice."""
        v = tuple(as_fraction(x) for x in v)
        if len(v) != self.ambient_dim:
            raise DimensionMismatch(
                f"vector of length {len(v)} in ambient dimension {self.ambient_dim}")
        coords = linalg.vec_mat(v, self.basis_inverse)
        if any(c.denominator != 1 for c in coords):
            return None
        return tuple(int(c) for c in coords)

    def ambient(self, coords) -> tuple[Fraction, ...]:
        """The lattice point with the given integer basis coordinates."""
        coords = tuple(coords)
        cached = self._ambient_cache.get(coords)
        if cached is None:
            cached = linalg.vec_mat(tuple(Fraction(c) for c in coords), self.basis)
            self._ambient_cache[coords] = cached
        return cached

    def contains(self, v) -> bool:
        return self.coordinates(v) is not None

    def __eq__(self, other):
        if not isinstance(other, Lattice):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        rows = ", ".join("(" + ",".join(map(rational_str, r)) + ")" for r in self.basis)
        return f"Lattice(dim={self.ambient_dim}, basis=[{rows}])"

    def to_dict(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "generators": [vector_strs(g) for g in self.generators],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Lattice":
        return cls(int(data["ambient_dim"]),
                   [[as_fraction(x) for x in g] for g in data["generators"]])


def lattice_from_generators(ambient_dim: int, generators) -> Lattice:
    return Lattice(ambient_dim, generators)


def pairing(alpha, del_coeffs) -> Fraction:
    """<alpha, d> = sum_p a_p alpha_p for d = sum_p a_p d_p in the standard basis."""
    return linalg.dot(alpha, del_coeffs)


def dual_derivation_basis(lattice: Lattice, alphas):
    """Rows of the returned matrix express d_p in the standard derivation basis.

    The defining property is <alpha^(p), d_q> = delta_{p,q} exactly.
    """
    rows = tuple(tuple(as_fraction(x) for x in a) for a in alphas)
    if len(rows) != lattice.ambient_dim or any(
            len(r) != lattice.ambient_dim for r in rows):
        raise DimensionMismatch("need l points of length l")
    try:
        return linalg.mat_inverse(linalg.transpose(rows))
    except SingularMatrix:
        raise SingularBasis("chosen points are linearly dependent") from None


class BlockMatrix:
    """Invertible l x l rational matrix with vanishing upper-right l1 x l2 block."""

    __slots__ = ("ell1", "ell2", "entries")

    def __init__(self, ell1: int, ell2: int, entries):
        ell = ell1 + ell2
        rows = linalg.to_matrix(entries)
        if len(rows) != ell or any(len(r) != ell for r in rows):
            raise DimensionMismatch(f"expected a {ell}x{ell} matrix")
        for r in range(ell1):
            for c in range(ell1, ell):
                if rows[r][c] != 0:
                    raise BlockShapeViolation(
                        f"entry ({r + 1},{c + 1}) must vanish in block form")
        self.ell1 = ell1
        self.ell2 = ell2
        self.entries = rows
        if linalg.mat_det(self.block_M) == 0 or linalg.mat_det(self.block_Q) == 0:
            raise SingularMatrix("diagonal blocks must be invertible")

    @property
    def ell(self) -> int:
        return self.ell1 + self.ell2

    @property
    def block_M(self):
        return tuple(row[:self.ell1] for row in self.entries[:self.ell1])

    @property
    def block_P(self):
        return tuple(row[:self.ell1] for row in self.entries[self.ell1:])

    @property
    def block_Q(self):
        return tuple(row[self.ell1:] for row in self.entries[self.ell1:])

    @classmethod
    def identity(cls, ell1: int, ell2: int) -> "BlockMatrix":
        return cls(ell1, ell2, linalg.identity(ell1 + ell2))

    def mul(self, other: "BlockMatrix") -> "BlockMatrix":
        return BlockMatrix(self.ell1, self.ell2,
                           linalg.mat_mul(self.entries, other.entries))

    def inverse(self) -> "BlockMatrix":
        return BlockMatrix(self.ell1, self.ell2, linalg.mat_inverse(self.entries))

    def row_action(self, v):
        """v . G for a length-l row vector."""
        return linalg.vec_mat(tuple(as_fraction(x) for x in v), self.entries)

    def m_transpose_inverse(self):
        """(M^t)^{-1}, the matrix acting on the polynomial generator row."""
        return linalg.mat_inverse(linalg.transpose(self.block_M))

    def is_identity(self) -> bool:
        return self.entries == linalg.identity(self.ell)

    def __eq__(self, other):
        if not isinstance(other, BlockMatrix):
            return NotImplemented
        return (self.ell1, self.ell2, self.entries) == (other.ell1, other.ell2, other.entries)

    def __hash__(self):
        return hash((self.ell1, self.ell2, self.entries))

    def __repr__(self):
        return f"BlockMatrix(ell1={self.ell1}, ell2={self.ell2}, entries={self.entries})"


def aut2_membership(lattice: Lattice, G: BlockMatrix) -> bool:
    """True iff Gamma . G = Gamma exactly (basis rows map to a basis)."""
    if G.ell != lattice.ambient_dim:
        raise DimensionMismatch("matrix size differs from ambient dimension")
    coord_rows = []
    for row in lattice.basis:
        coords = lattice.coordinates(G.row_action(row))
        if coords is None:
            return False
        coord_rows.append(tuple(Fraction(c) for c in coords))
    return abs(linalg.mat_det(tuple(coord_rows))) == 1


class Character:
    """A multiplicative map Gamma -> Q*, stored by its values on the basis rows."""

    __slots__ = ("lattice", "values")

    def __init__(self, lattice: Lattice, values):
        vals = tuple(as_fraction(x) for x in values)
        if len(vals) != lattice.ambient_dim:
            raise DimensionMismatch("one value per canonical basis row")
        if any(v == 0 for v in vals):
            raise ValueError("character values must be nonzero")
        self.lattice = lattice
        self.values = vals

    @classmethod
    def trivial(cls, lattice: Lattice) -> "Character":
        return cls(lattice, (Fraction(1),) * lattice.ambient_dim)

    def evaluate_coords(self, coords) -> Fraction:
        out = Fraction(1)
        for v, n in zip(self.values, coords):
            if n:
                out *= v ** n
        return out

    def evaluate(self, alpha) -> Fraction:
        coords = self.lattice.coordinates(alpha)
        if coords is None:
            raise NotMember(f"{alpha} is not a lattice point")
        return self.evaluate_coords(coords)

    def is_trivial(self) -> bool:
        return all(v == 1 for v in self.values)

    def __eq__(self, other):
        if not isinstance(other, Character):
            return NotImplemented
        return self.lattice == other.lattice and self.values == other.values

    def __hash__(self):
        return hash((self.lattice, self.values))

    def __repr__(self):
        return f"Character({', '.join(map(rational_str, self.values))})"


def char_eval(f: Character, alpha) -> Fraction:
    return f.evaluate(alpha)
