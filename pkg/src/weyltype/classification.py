"""Isomorphism testing, the faithfulness witness, and adjoint-growth probes.

Two algebras are isomorphic exactly when (l1, l2) agree and a block matrix G
carries one lattice onto the other; the verifier builds the generator map
that witnesses this and checks it exactly, while the bounded search
enumerates unimodular coordinate changes and is explicitly allowed to give
up with ``unknown``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as _cartesian

from . import linalg
from .algebra import (
    Element,
    Monomial,
    Signature,
    act_on_A,
    filtration_data,
    unit_index,
)
from .automorphisms import _hom_extend, _linear_combination
from .errors import (
    HomomorphismCounterexample,
    LatticeNotMapped,
    NotInFD,
    SignatureMismatch,
    ZeroElement,
)
from .lattice import BlockMatrix, Character
from .sampling import random_element


# ---------------------------------------------------------------------------
# invariants and the isomorphism verifier
# ---------------------------------------------------------------------------

def signature_invariants(sig: Signature):
    """The isomorphism invariants: (l1, l2) and the canonical lattice basis."""
    return (sig.ell1, sig.ell2, sig.lattice.basis)


@dataclass(frozen=True)
class IsoCandidate:
    """A block matrix G plus a character on the source lattice."""

    G: BlockMatrix
    f: Character


class IsoMap:
    """A verified generator-image map between two algebras of the same shape."""

    __slots__ = ("src", "dst", "candidate", "_coord_map", "_x1_images", "_d_images")

    def __init__(self, src: Signature, dst: Signature, candidate: IsoCandidate):
        self.src = src
        self.dst = dst
        self.candidate = candidate
        G = candidate.G
        g_inv = linalg.mat_inverse(G.entries)
        rows = []
        for b in src.lattice.basis:
            coords = dst.lattice.coordinates(linalg.vec_mat(b, g_inv))
            if coords is None:
                raise LatticeNotMapped(
                    f"basis row {b} . G^-1 is not a point of the target lattice")
            rows.append(coords)
        if abs(linalg.mat_det(tuple(tuple(Fraction(c) for c in r) for r in rows))) != 1:
            raise LatticeNotMapped("Gamma . G^-1 is a proper sublattice of the target")
        self._coord_map = tuple(rows)
        mt_inv = G.m_transpose_inverse()
        self._x1_images = [
            _linear_combination(dst, "xi",
                                {r: mt_inv[r][p] for r in range(dst.ell1)})
            for p in range(src.ell1)
        ]
        self._d_images = [
            _linear_combination(dst, "d",
                                {p: G.entries[p][q] for p in range(dst.ell)})
            for q in range(src.ell)
        ]

    def x_image(self, alpha_coords) -> Element:
        ell = self.dst.ell
        out = [0] * ell
        for k, n in enumerate(alpha_coords):
            if n:
                row = self._coord_map[k]
                for j in range(ell):
                    out[j] += n * row[j]
        zero = (0,) * ell
        coeff = self.candidate.f.evaluate_coords(alpha_coords)
        return Element(self.dst, {Monomial(tuple(out), zero, zero): coeff})

    def d_image(self, q: int) -> Element:
        return self._d_images[q - 1]

    def x1_image(self, p: int) -> Element:
        return self._x1_images[p - 1]

    def apply(self, w: Element) -> Element:
        if w.signature != self.src:
            raise SignatureMismatch("element does not belong to the source algebra")
        return _hom_extend(w, self.dst, self.x_image,
                           self._x1_images, self._d_images)

    def generator_table(self) -> dict:
        table = {}
        for k in range(1, self.src.ell + 1):
            table[f"x+{k}"] = self.x_image(unit_index(self.src.ell, k))
        for p in range(1, self.src.ell1 + 1):
            table[f"xi{p}"] = self.x1_image(p)
        for q in range(1, self.src.ell + 1):
            table[f"d{q}"] = self.d_image(q)
        return table


def iso_verify(src: Signature, dst: Signature, cand: IsoCandidate,
               trials: int = 100, seed: int = 0) -> IsoMap:
    """Build the generator map for the candidate and check it exactly.

    Checks the duality relations on generators and the multiplicative law on
    ``trials`` random products; raises on any violation.
    """
    if (src.ell1, src.ell2) != (dst.ell1, dst.ell2):
        raise SignatureMismatch("(l1, l2) invariants differ")
    iso = IsoMap(src, dst, cand)

    one = dst.one()
    for p in range(1, src.ell + 1):
        for q in range(1, src.ell1 + 1):
            acted = act_on_A(iso.d_image(p), iso.x1_image(q))
            expected = one.scale(1 if p == q else 0)
            if acted != expected:
                raise HomomorphismCounterexample(
                    f"duality fails on d{p}, x^(1_[{q}])",
                    lhs=acted, rhs=expected)
        for k in range(1, src.ell + 1):
            alpha = unit_index(src.ell, k)
            lhs = act_on_A(iso.d_image(p), iso.x_image(alpha))
            grade = src.lattice.ambient(alpha)[p - 1]
            rhs = iso.x_image(alpha).scale(grade)
            if lhs != rhs:
                raise HomomorphismCounterexample(
                    f"derivation action fails on d{p}, basis row {k}",
                    lhs=lhs, rhs=rhs)

    rng = random.Random(seed)
    for trial in range(1, trials + 1):
        a = random_element(src, rng)
        b = random_element(src, rng)
        lhs = iso.apply(a * b)
        rhs = iso.apply(a) * iso.apply(b)
        if lhs != rhs:
            raise HomomorphismCounterexample(
                f"product law fails at trial {trial}", a=a, b=b, lhs=lhs, rhs=rhs)
    return iso


@dataclass
class IsoSearchResult:
    status: str                      # "found" | "impossible" | "unknown"
    candidate: IsoCandidate | None = None
    iso: IsoMap | None = None
    reason: str = ""
    tried: int = 0

    def to_dict(self) -> dict:
        from .rationals import rational_str

        out = {"status": self.status, "tried": self.tried, "reason": self.reason}
        if self.candidate is not None:
            out["certificate"] = {
                "G": [[rational_str(x) for x in row]
                      for row in self.candidate.G.entries],
                "f": [rational_str(x) for x in self.candidate.f.values],
            }
        return out


def iso_search_bounded(src: Signature, dst: Signature, bound: int,
                       trials: int = 20) -> IsoSearchResult:
    """Search unimodular coordinate changes with entries in [-bound, bound].

    ``impossible`` is certified by the (l1, l2) invariant; ``unknown`` means
    the budget ran out, not that no isomorphism exists.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if (src.ell1, src.ell2) != (dst.ell1, dst.ell2):
        return IsoSearchResult(
            "impossible",
            reason=f"(l1, l2) = {(src.ell1, src.ell2)} != {(dst.ell1, dst.ell2)}")
    tried = 0
    basis = src.lattice.basis
    dst_basis = dst.lattice.basis
    for U in linalg.unimodular_matrices(src.ell, bound):
        tried += 1
        # B . G^-1 = U . B'  =>  G = B'^-1 U^-1 B
        target = linalg.mat_mul(U, dst_basis)
        g_entries = linalg.mat_mul(linalg.mat_inverse(target), basis)
        try:
            G = BlockMatrix(src.ell1, src.ell2, g_entries)
            cand = IsoCandidate(G, Character.trivial(src.lattice))
            iso = iso_verify(src, dst, cand, trials=trials)
        except Exception:
            continue
        return IsoSearchResult("found", candidate=cand, iso=iso, tried=tried)
    return IsoSearchResult("unknown",
                           reason=f"no block candidate within bound {bound}",
                           tried=tried)


# ---------------------------------------------------------------------------
# faithfulness witness
# ---------------------------------------------------------------------------

def faithfulness_witness(sig: Signature, u: Element):
    """A lattice point alpha with u(x^alpha) != 0 for nonzero u in F[D].

    Scans alpha = sum n_q b_q over the grid 0 <= n_q <= level(u) in graded
    lexicographic order; a nonzero derivation polynomial of level L cannot
    vanish on the whole (L+1)^l grid.
    """
    if u.signature != sig:
        raise SignatureMismatch("element belongs to a different algebra")
    if u.is_zero:
        raise ZeroElement("the zero element acts trivially everywhere")
    if not u.in_FD():
        raise NotInFD("witness search expects a pure derivation polynomial")
    ell = sig.ell
    degree = u.max_level()
    zero = (0,) * ell
    grid = sorted(_cartesian(range(degree + 1), repeat=ell),
                  key=lambda n: (sum(n), n))
    for n in grid:
        probe = Element(sig, {Monomial(n, zero, zero): Fraction(1)})
        if act_on_A(u, probe):
            return sig.lattice.ambient(n)
    raise AssertionError("grid bound violated; the element cannot be nonzero")


def witness_report(sig: Signature, u: Element) -> dict:
    """JSON-ready certificate: the witness point, its coordinates, and the
    nonzero value of the action there."""
    from .algebra import element_to_dict
    from .rationals import rational_str

    alpha = faithfulness_witness(sig, u)
    coords = sig.lattice.coordinates(alpha)
    zero = (0,) * sig.ell
    probe = Element(sig, {Monomial(coords, zero, zero): Fraction(1)})
    return {
        "alpha": [rational_str(x) for x in alpha],
        "coords": list(coords),
        "value": element_to_dict(act_on_A(u, probe)),
    }


# ---------------------------------------------------------------------------
# adjoint behavior
# ---------------------------------------------------------------------------

@dataclass
class AdBehavior:
    """Syntactic class of ad(w): locally nilpotent on A, locally finite on
    D + A, or wild, together with a probe trace for wild elements."""

    tag: str                         # "in_A" | "in_D_plus_A" | "wild"
    probe: Element | None = None
    trace: list | None = None

    def to_dict(self) -> dict:
        from .algebra import element_to_dict

        out: dict = {"tag": self.tag}
        if self.probe is not None:
            out["probe"] = element_to_dict(self.probe)
        if self.trace is not None:
            out["trace"] = [{"step": s, "level": lvl,
                             "gamma_degree": list(g) if g is not None else None}
                            for s, lvl, g in self.trace]
        return out


def _in_D_plus_A(w: Element) -> bool:
    zero = (0,) * w.signature.ell
    for (al, i, mu) in w.terms:
        lvl = sum(mu)
        if lvl > 1:
            return False
        if lvl == 1 and (al != zero or any(i)):
            return False
    return True


def growth_probe(w: Element, probe: Element, steps: int) -> list:
    """Rows (step, level, gamma_degree) of the iterated bracket (ad w)^s(probe)."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    rows = []
    cur = probe
    for s in range(steps + 1):
        data = filtration_data(cur)
        rows.append((s, data.level, data.gamma_degree))
        if s < steps:
            cur = w.bracket(cur)
    return rows


def _wild_probe(w: Element) -> Element:
    """The probe the growth argument uses: a basis point when every top-level
    term sits at lattice degree zero, twice the extreme degree otherwise."""
    sig = w.signature
    ell = sig.ell
    zero = (0,) * ell
    top = w.max_level()
    support = [(al, i, mu) for (al, i, mu) in w.terms if sum(mu) == top]
    gammas = {al for al, _, _ in support}
    if gammas == {zero}:
        lam = max((mu for al, i, mu in support if al == zero),
                  key=lambda mu: (sum(mu), mu))
        k = max(q for q in range(ell) if lam[q])
        coords = unit_index(ell, k + 1)
    else:
        beta = max(gammas)
        if beta == zero:
            beta = min(gammas)
        coords = tuple(2 * b for b in beta)
    return Element(sig, {Monomial(coords, zero, zero): Fraction(1)})


def classify_ad_behavior(w: Element, steps: int = 5) -> AdBehavior:
    """Classify ad(w) by the shape of the support; wild elements come with a
    growth trace on the argument's probe."""
    if w.in_A():
        return AdBehavior("in_A")
    if _in_D_plus_A(w):
        return AdBehavior("in_D_plus_A")
    probe = _wild_probe(w)
    return AdBehavior("wild", probe=probe, trace=growth_probe(w, probe, steps))
