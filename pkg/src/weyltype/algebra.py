"""The Weyl-type algebra W(l1, l2, Gamma): monomials, sparse elements, product.

Basis symbols are x^{alpha,i} d^mu with alpha a lattice point, i a polynomial
multi-index supported on the first l1 slots, and mu a derivation multi-index.
Elements are sparse rational linear combinations keyed by
(alpha-coordinates, i, mu); the alpha key holds integer coordinates with
respect to the lattice's canonical basis, so term keys are pure integer data.

The product is the bilinear extension of

    u d^mu . v d^nu = sum_lam binom(mu, lam) u d^lam(v) d^{mu+nu-lam}

with d_p acting on the commutative part as grading by the p-th ambient
coordinate plus, for p <= l1, lowering of the polynomial index.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as _cartesian
from math import comb
from typing import NamedTuple

from .errors import (
    DimensionMismatch,
    NotInA,
    NotMember,
    SignatureMismatch,
    SingularMatrix,
)
from . import linalg
from .lattice import Lattice
from .rationals import as_fraction, rational_str


# ---------------------------------------------------------------------------
# multi-indices
# ---------------------------------------------------------------------------

def level(mu) -> int:
    """|mu|, the total derivation degree."""
    return sum(mu)


def multi_binomial(mu, nu) -> int:
    """Product of componentwise binomials; 0 as soon as some nu_p > mu_p."""
    if len(mu) != len(nu):
        raise DimensionMismatch("multi-indices of different length")
    out = 1
    for m, n in zip(mu, nu):
        if n < 0 or n > m:
            return 0
        out *= comb(m, n)
    return out


def multi_index_key(mu):
    """Sort key realizing the level-then-lexicographic total order."""
    return (sum(mu), tuple(mu))


def total_order_cmp(mu, nu) -> int:
    """-1, 0 or 1 according to the level-first total order on multi-indices."""
    if len(mu) != len(nu):
        raise DimensionMismatch("multi-indices of different length")
    a, b = multi_index_key(mu), multi_index_key(nu)
    return (a > b) - (a < b)


def alternating_binomial_sum(mu, nu) -> int:
    """sum over lam <= mu of (-1)^|lam| binom(mu, nu-lam) binom(mu+lam-nu, lam).

    Evaluates to 1 when nu = 0 and to 0 otherwise; the tests check that
    instead of assuming it.
    """
    if len(mu) != len(nu):
        raise DimensionMismatch("multi-indices of different length")
    total = 0
    for lam in _bounded_multi_indices(mu):
        first = multi_binomial(mu, tuple(n - l for n, l in zip(nu, lam)))
        if first == 0:
            continue
        second = multi_binomial(tuple(m + l - n for m, l, n in zip(mu, lam, nu)), lam)
        if second == 0:
            continue
        total += (-1) ** sum(lam) * first * second
    return total


def _bounded_multi_indices(bound):
    """All multi-indices lam with 0 <= lam <= bound componentwise."""
    return _cartesian(*(range(b + 1) for b in bound))


def unit_index(ell: int, p: int, value: int = 1) -> tuple[int, ...]:
    """The multi-index with ``value`` in 1-based slot p and zeros elsewhere."""
    out = [0] * ell
    out[p - 1] = value
    return tuple(out)


# ---------------------------------------------------------------------------
# signature and monomials
# ---------------------------------------------------------------------------

class Monomial(NamedTuple):
    alpha: tuple[int, ...]  # coordinates w.r.t. the canonical lattice basis
    i: tuple[int, ...]      # polynomial part, zero past slot l1
    mu: tuple[int, ...]     # derivation exponents


def monomial_sort_key(m: Monomial):
    return (m.alpha, multi_index_key(m.i), multi_index_key(m.mu))


@dataclass(frozen=True)
class Signature:
    """The triple (l1, l2, Gamma) identifying one algebra."""

    ell1: int
    ell2: int
    lattice: Lattice

    def __post_init__(self):
        if self.ell1 < 0 or self.ell2 < 0 or self.ell1 + self.ell2 < 1:
            raise DimensionMismatch("need l1, l2 >= 0 with l1 + l2 >= 1")
        if self.lattice.ambient_dim != self.ell1 + self.ell2:
            raise DimensionMismatch("lattice ambient dimension must equal l1 + l2")

    @property
    def ell(self) -> int:
        return self.ell1 + self.ell2

    def check_monomial(self, m: Monomial):
        ell = self.ell
        if len(m.alpha) != ell or len(m.i) != ell or len(m.mu) != ell:
            raise DimensionMismatch(f"monomial {m} does not match l = {ell}")
        if any(x < 0 for x in m.i) or any(x < 0 for x in m.mu):
            raise ValueError(f"negative exponent in {m}")
        if any(m.i[p] for p in range(self.ell1, ell)):
            raise DimensionMismatch(
                f"polynomial index of {m} extends past slot {self.ell1}")

    # -- element constructors ------------------------------------------------

    def zero(self) -> "Element":
        return Element(self, {})

    def one(self) -> "Element":
        return self.scalar(1)

    def scalar(self, c) -> "Element":
        z = (0,) * self.ell
        return Element(self, {Monomial(z, z, z): as_fraction(c)})

    def monomial(self, alpha=None, i=None, mu=None, coeff=1) -> "Element":
        """Build coeff * x^{alpha,i} d^mu from an ambient lattice point alpha."""
        ell = self.ell
        alpha = tuple(as_fraction(a) for a in (alpha if alpha is not None else (0,) * ell))
        coords = self.lattice.coordinates(alpha)
        if coords is None:
            raise NotMember(f"{alpha} is not a point of the lattice")
        i = tuple(i) if i is not None else (0,) * ell
        mu = tuple(mu) if mu is not None else (0,) * ell
        m = Monomial(coords, i, mu)
        self.check_monomial(m)
        return Element(self, {m: as_fraction(coeff)})

    def x(self, alpha, i=None, coeff=1) -> "Element":
        return self.monomial(alpha=alpha, i=i, coeff=coeff)

    def d(self, q: int, power: int = 1, coeff=1) -> "Element":
        """The derivation generator d_q (1-based), raised to ``power``."""
        if not 1 <= q <= self.ell:
            raise DimensionMismatch(f"derivation index {q} outside 1..{self.ell}")
        return self.monomial(mu=unit_index(self.ell, q, power), coeff=coeff)

    def x_poly(self, p: int, power: int = 1, coeff=1) -> "Element":
        """The polynomial generator x^{1_[p]} (1-based p <= l1), raised to ``power``."""
        if not 1 <= p <= self.ell1:
            raise DimensionMismatch(f"polynomial index {p} outside 1..{self.ell1}")
        return self.monomial(i=unit_index(self.ell, p, power), coeff=coeff)

    def ambient_coordinate(self, alpha_coords, p: int) -> Fraction:
        """The 0-based p-th ambient coordinate of the lattice point with given coords."""
        return self.lattice.ambient(alpha_coords)[p]

    def to_dict(self) -> dict:
        return {"ell1": self.ell1, "ell2": self.ell2, "lattice": self.lattice.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "Signature":
        return cls(int(data["ell1"]), int(data["ell2"]),
                   Lattice.from_dict(data["lattice"]))


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------

class Element:
    """A sparse rational combination of basis monomials of one algebra."""

    __slots__ = ("signature", "terms")

    def __init__(self, signature: Signature, terms, _checked: bool = False):
        pruned = {}
        for m, c in terms.items():
            c = as_fraction(c)
            if c == 0:
                continue
            if not isinstance(m, Monomial):
                m = Monomial(tuple(m[0]), tuple(m[1]), tuple(m[2]))
            if not _checked:
                signature.check_monomial(m)
            pruned[m] = c
        self.signature = signature
        self.terms = pruned

    # -- basics ---------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: monomial_sort_key(kv[0]))

    def _require_same(self, other: "Element"):
        if self.signature != other.signature:
            raise SignatureMismatch("elements belong to different algebras")

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.signature == other.signature and self.terms == other.terms

    def __add__(self, other: "Element") -> "Element":
        self._require_same(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Element(self.signature, out, _checked=True)

    def __neg__(self) -> "Element":
        return Element(self.signature, {m: -c for m, c in self.terms.items()},
                       _checked=True)

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def scale(self, c) -> "Element":
        c = as_fraction(c)
        if c == 0:
            return self.signature.zero()
        return Element(self.signature, {m: c * v for m, v in self.terms.items()},
                       _checked=True)

    def __mul__(self, other):
        if isinstance(other, Element):
            return _mul_elements(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        return self.scale(Fraction(1) / as_fraction(other))

    def bracket(self, other: "Element") -> "Element":
        """The commutator self . other - other . self."""
        return _mul_elements(self, other) - _mul_elements(other, self)

    # -- structure queries ------------------------------------------------------

    def max_level(self):
        return max((sum(m.mu) for m in self.terms), default=None)

    def in_A(self) -> bool:
        return all(sum(m.mu) == 0 for m in self.terms)

    def in_FD(self) -> bool:
        return all(m.alpha == (0,) * self.signature.ell and sum(m.i) == 0
                   for m in self.terms)

    def constant_coefficient(self) -> Fraction:
        z = (0,) * self.signature.ell
        return self.terms.get(Monomial(z, z, z), Fraction(0))

    def without_constant(self) -> "Element":
        z = (0,) * self.signature.ell
        out = dict(self.terms)
        out.pop(Monomial(z, z, z), None)
        return Element(self.signature, out, _checked=True)

    def __repr__(self):
        if self.is_zero:
            return "Element(0)"
        bits = []
        for m, c in self.sorted_terms():
            bits.append(f"{rational_str(c)}*x{m.alpha}{m.i}d{m.mu}")
        return "Element(" + " + ".join(bits) + ")"


# ---------------------------------------------------------------------------
# derivation actions and the product
# ---------------------------------------------------------------------------

def _derive_A_terms(sig: Signature, terms: dict, p: int) -> dict:
    """Apply the 0-based derivation d_p to A-part term data {(alpha, i): coeff}."""
    out: dict = {}
    lattice = sig.lattice
    for (al, i), c in terms.items():
        grade = lattice.ambient(al)[p]
        if grade:
            key = (al, i)
            out[key] = out.get(key, Fraction(0)) + c * grade
        if p < sig.ell1 and i[p] > 0:
            low = list(i)
            low[p] -= 1
            key = (al, tuple(low))
            out[key] = out.get(key, Fraction(0)) + c * i[p]
    return {k: v for k, v in out.items() if v != 0}


def _mul_elements(a: Element, b: Element) -> Element:
    a._require_same(b)
    sig = a.signature
    out: dict = {}
    memo: dict = {}

    def derived(mkey, lam):
        # d^lam of b's A-part, built one derivation at a time and memoized
        entry = memo.get((mkey, lam))
        if entry is None:
            if not any(lam):
                entry = {mkey: Fraction(1)}
            else:
                p = next(idx for idx, v in enumerate(lam) if v)
                prev = list(lam)
                prev[p] -= 1
                entry = _derive_A_terms(sig, derived(mkey, tuple(prev)), p)
            memo[(mkey, lam)] = entry
        return entry

    for (al1, i1, mu1), c1 in a.terms.items():
        for (al2, i2, mu2), c2 in b.terms.items():
            amb2 = sig.lattice.ambient(al2)
            # d_p^k(x^{al2,i2}) vanishes past the polynomial index when the
            # grading eigenvalue is zero, so cap the expansion there
            bounds = tuple(
                mu1[p] if amb2[p] != 0
                else (min(mu1[p], i2[p]) if p < sig.ell1 else 0)
                for p in range(sig.ell))
            c12 = c1 * c2
            for lam in _bounded_multi_indices(bounds):
                table = derived((al2, i2), lam)
                if not table:
                    continue
                mu_out = tuple(m1 + m2 - l for m1, m2, l in zip(mu1, mu2, lam))
                base = c12 * multi_binomial(mu1, lam)
                for (al, i), q in table.items():
                    key = Monomial(tuple(x + y for x, y in zip(al1, al)),
                                   tuple(x + y for x, y in zip(i1, i)),
                                   mu_out)
                    out[key] = out.get(key, Fraction(0)) + base * q
    return Element(sig, out, _checked=True)


def derivation_apply(sig: Signature, lam, target: Element) -> Element:
    """Apply d^lam to an element of A; the result stays in A."""
    if not target.in_A():
        raise NotInA("target must have no derivation part")
    if len(lam) != sig.ell:
        raise DimensionMismatch("multi-index length differs from l")
    terms = {(m.alpha, m.i): c for m, c in target.terms.items()}
    for p, k in enumerate(lam):
        for _ in range(k):
            terms = _derive_A_terms(sig, terms, p)
    zero_mu = (0,) * sig.ell
    return Element(sig, {Monomial(al, i, zero_mu): c for (al, i), c in terms.items()},
                   _checked=True)


def act_on_A(w: Element, a: Element) -> Element:
    """The natural action: each term u d^mu of w sends a to u . d^mu(a)."""
    w._require_same(a)
    if not a.in_A():
        raise NotInA("the acted-on element must lie in A")
    sig = w.signature
    a_terms = {(m.alpha, m.i): c for m, c in a.terms.items()}
    out: dict = {}
    zero_mu = (0,) * sig.ell
    for (al, i, mu), c in w.terms.items():
        derived = dict(a_terms)
        for p, k in enumerate(mu):
            for _ in range(k):
                derived = _derive_A_terms(sig, derived, p)
        for (al2, i2), q in derived.items():
            key = Monomial(tuple(x + y for x, y in zip(al, al2)),
                           tuple(x + y for x, y in zip(i, i2)),
                           zero_mu)
            out[key] = out.get(key, Fraction(0)) + c * q
    return Element(sig, out, _checked=True)


def change_D_basis(sig: Signature, C, w: Element) -> Element:
    """Rewrite derivation exponents taken in the basis d'_q = sum_p C[p][q] d_p.

    The matrix columns give the primed generators in the standard basis; the
    rewrite is a multinomial expansion inside the commutative polynomial
    algebra of derivations, applied termwise.
    """
    C = linalg.to_matrix(C)
    if len(C) != sig.ell or any(len(r) != sig.ell for r in C):
        raise DimensionMismatch("change of basis matrix must be l x l")
    if linalg.mat_det(C) == 0:
        raise SingularMatrix("change of basis matrix must be invertible")
    expansions: dict = {}
    out: dict = {}
    zero = (0,) * sig.ell
    for (al, i, mu), c in w.terms.items():
        poly = expansions.get(mu)
        if poly is None:
            poly = {zero: Fraction(1)}
            for q, k in enumerate(mu):
                column = {p: C[p][q] for p in range(sig.ell) if C[p][q] != 0}
                for _ in range(k):
                    poly = _poly_times_linear(poly, column, sig.ell)
            expansions[mu] = poly
        for mu_out, coeff in poly.items():
            key = Monomial(al, i, mu_out)
            out[key] = out.get(key, Fraction(0)) + c * coeff
    return Element(sig, out, _checked=True)


def _poly_times_linear(poly: dict, column: dict, ell: int) -> dict:
    out: dict = {}
    for mu, c in poly.items():
        for p, cp in column.items():
            bumped = list(mu)
            bumped[p] += 1
            key = tuple(bumped)
            out[key] = out.get(key, Fraction(0)) + c * cp
    return out


# ---------------------------------------------------------------------------
# filtration data
# ---------------------------------------------------------------------------

class FiltrationData(NamedTuple):
    gamma_degree: tuple[int, ...] | None  # lex-max basis coordinates over support
    i_degree: tuple[int, ...] | None      # componentwise max polynomial index
    level: int | None                     # max |mu|


def filtration_data(w: Element) -> FiltrationData:
    """Componentwise maxima over the support; all None for the zero element."""
    if w.is_zero:
        return FiltrationData(None, None, None)
    gamma = max(m.alpha for m in w.terms)
    i_deg = tuple(max(m.i[p] for m in w.terms) for p in range(w.signature.ell))
    lev = max(sum(m.mu) for m in w.terms)
    return FiltrationData(gamma, i_deg, lev)


# ---------------------------------------------------------------------------
# JSON-facing serialization
# ---------------------------------------------------------------------------

def element_to_dict(e: Element) -> dict:
    lattice = e.signature.lattice
    terms = []
    for m, c in e.sorted_terms():
        terms.append({
            "alpha": [rational_str(x) for x in lattice.ambient(m.alpha)],
            "i": list(m.i),
            "mu": list(m.mu),
            "coeff": rational_str(c),
        })
    return {"signature": e.signature.to_dict(), "terms": terms}


def element_from_dict(data: dict, signature: Signature | None = None) -> Element:
    sig = signature if signature is not None else Signature.from_dict(data["signature"])
    out = sig.zero()
    for t in data["terms"]:
        out = out + sig.monomial(
            alpha=[as_fraction(x) for x in t["alpha"]],
            i=[int(x) for x in t["i"]],
            mu=[int(x) for x in t["mu"]],
            coeff=as_fraction(t["coeff"]),
        )
    return out
