"""Automorphism families of the algebra, their normal form and decomposition.

Four families generate everything:

* ``TauAut``       -- lattice symmetry plus character twist, tau = (G, f);
* ``InnerExp``     -- exp(ad u) for u in the commutative part A;
* ``ShiftV``       -- affine shift of the polynomial and derivation generators;
* ``Sigma1``       -- the order-2 twist x^{a,i} d^mu -> -(-d)^mu . x^{a,i},
                      a bracket automorphism only.

A ``NormalFormAut`` is the composite sigma_tau . sigma_u . sigma_v . sigma_1^eps.
``decompose_automorphism`` recovers that factored form from the images of the
generating set alone, by peeling one family at a time.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .algebra import (
    Element,
    Monomial,
    Signature,
    element_from_dict,
    element_to_dict,
    unit_index,
)
from .errors import (
    DimensionMismatch,
    LatticeNotMapped,
    NotAnAutomorphism,
    NotInA,
    SignatureMismatch,
    Sigma1NotSupported,
)
from .lattice import BlockMatrix, Character, aut2_membership
from .rationals import as_fraction, rational_str
from .sampling import random_element

MODE_LIE = "lie"
MODE_ASSOC = "assoc"


# ---------------------------------------------------------------------------
# generating set
# ---------------------------------------------------------------------------

def generator_keys(sig: Signature) -> list[tuple]:
    """Keys of the extensional generating set: the unit, x^{+-b_k} for the
    canonical basis rows, the polynomial generators, and the derivations."""
    keys: list[tuple] = [("one",)]
    for k in range(1, sig.ell + 1):
        keys.append(("x", k, 1))
        keys.append(("x", k, -1))
    for p in range(1, sig.ell1 + 1):
        keys.append(("xi", p))
    for q in range(1, sig.ell + 1):
        keys.append(("d", q))
    return keys


def generator_element(sig: Signature, key: tuple) -> Element:
    kind = key[0]
    if kind == "one":
        return sig.one()
    if kind == "x":
        _, k, s = key
        coords = unit_index(sig.ell, k, s)
        zero = (0,) * sig.ell
        return Element(sig, {Monomial(coords, zero, zero): Fraction(1)})
    if kind == "xi":
        return sig.x_poly(key[1])
    if kind == "d":
        return sig.d(key[1])
    raise KeyError(key)


def _gen_label(key: tuple) -> str:
    kind = key[0]
    if kind == "one":
        return "one"
    if kind == "x":
        return f"x{'+' if key[2] > 0 else '-'}{key[1]}"
    if kind == "xi":
        return f"xi{key[1]}"
    return f"d{key[1]}"


def _gen_key_from_label(label: str) -> tuple:
    if label == "one":
        return ("one",)
    if label.startswith("xi"):
        return ("xi", int(label[2:]))
    if label.startswith("x"):
        return ("x", int(label[2:]), 1 if label[1] == "+" else -1)
    if label.startswith("d"):
        return ("d", int(label[1:]))
    raise KeyError(label)


# ---------------------------------------------------------------------------
# homomorphic extension along the fixed monomial factorization
# ---------------------------------------------------------------------------

def _hom_extend(w: Element, out_sig: Signature, x_image, x1_images, d_images) -> Element:
    """Extend generator images multiplicatively over w.

    Each monomial factors as x^alpha, then ascending polynomial generator
    powers, then ascending derivation powers; the images are multiplied in
    that fixed order.
    """
    sig = w.signature
    out = out_sig.zero()
    powers: dict = {}

    def power(tag, base: Element, k: int) -> Element:
        cached = powers.get((tag, k))
        if cached is None:
            cached = base if k == 1 else power(tag, base, k - 1) * base
            powers[(tag, k)] = cached
        return cached

    for (al, i, mu), c in w.terms.items():
        acc = x_image(al)
        for p in range(sig.ell1):
            if i[p]:
                acc = acc * power(("xi", p), x1_images[p], i[p])
        for q in range(sig.ell):
            if mu[q]:
                acc = acc * power(("d", q), d_images[q], mu[q])
        out = out + acc.scale(c)
    return out


# ---------------------------------------------------------------------------
# the four families
# ---------------------------------------------------------------------------

class TauAut:
    """sigma_tau for tau = (G, f): x^a -> f(a) x^{a G^{-1}}, derivation row
    times G, polynomial row times (M^t)^{-1}."""

    __slots__ = ("signature", "G", "f", "_coord_map", "_x1_images", "_d_images")

    def __init__(self, signature: Signature, G: BlockMatrix, f: Character):
        if (G.ell1, G.ell2) != (signature.ell1, signature.ell2):
            raise DimensionMismatch("block sizes differ from the signature")
        if f.lattice != signature.lattice:
            raise DimensionMismatch("character lives on a different lattice")
        if not aut2_membership(signature.lattice, G):
            raise LatticeNotMapped("Gamma . G != Gamma")
        self.signature = signature
        self.G = G
        self.f = f
        lattice = signature.lattice
        g_inv = G.inverse()
        rows = []
        for b in lattice.basis:
            coords = lattice.coordinates(g_inv.row_action(b))
            assert coords is not None
            rows.append(coords)
        self._coord_map = tuple(rows)
        mt_inv = G.m_transpose_inverse()
        self._x1_images = [
            _linear_combination(signature, "xi",
                                {r: mt_inv[r][p] for r in range(signature.ell1)})
            for p in range(signature.ell1)
        ]
        self._d_images = [
            _linear_combination(signature, "d",
                                {p: G.entries[p][q] for p in range(signature.ell)})
            for q in range(signature.ell)
        ]

    def star(self, alpha_coords) -> tuple[int, ...]:
        """Coordinates of tau*(alpha) = alpha . G^{-1}."""
        ell = self.signature.ell
        out = [0] * ell
        for k, n in enumerate(alpha_coords):
            if n:
                row = self._coord_map[k]
                for j in range(ell):
                    out[j] += n * row[j]
        return tuple(out)

    def _x_image(self, alpha_coords) -> Element:
        sig = self.signature
        zero = (0,) * sig.ell
        coeff = self.f.evaluate_coords(alpha_coords)
        return Element(sig, {Monomial(self.star(alpha_coords), zero, zero): coeff})

    def apply(self, w: Element) -> Element:
        if w.signature != self.signature:
            raise SignatureMismatch("element belongs to a different algebra")
        return _hom_extend(w, self.signature, self._x_image,
                           self._x1_images, self._d_images)

    def inverse(self) -> "TauAut":
        lattice = self.signature.lattice
        g_inv = self.G.inverse()
        values = []
        for b in lattice.basis:
            image = self.G.row_action(b)
            values.append(1 / self.f.evaluate(image))
        return TauAut(self.signature, g_inv, Character(lattice, values))

    def compose(self, other: "TauAut") -> "TauAut":
        """tau_self after tau_other: G multiplies left-to-right, the character
        picks up the other's lattice motion."""
        lattice = self.signature.lattice
        values = []
        for k, b in enumerate(lattice.basis):
            coords = (0,) * k + (1,) + (0,) * (lattice.ambient_dim - k - 1)
            moved = other.star(coords)
            values.append(other.f.evaluate_coords(coords) * self.f.evaluate_coords(moved))
        return TauAut(self.signature, self.G.mul(other.G),
                      Character(lattice, values))

    def is_identity(self) -> bool:
        return self.G.is_identity() and self.f.is_trivial()

    @classmethod
    def identity(cls, sig: Signature) -> "TauAut":
        return cls(sig, BlockMatrix.identity(sig.ell1, sig.ell2),
                   Character.trivial(sig.lattice))

    def __eq__(self, other):
        if not isinstance(other, TauAut):
            return NotImplemented
        return (self.signature, self.G, self.f) == (other.signature, other.G, other.f)

    def __repr__(self):
        return f"TauAut(G={self.G.entries}, f={self.f})"


def _linear_combination(sig: Signature, kind: str, coeffs: dict) -> Element:
    zero = (0,) * sig.ell
    terms = {}
    for idx, c in coeffs.items():
        if c == 0:
            continue
        if kind == "xi":
            terms[Monomial(zero, unit_index(sig.ell, idx + 1), zero)] = c
        else:
            terms[Monomial(zero, zero, unit_index(sig.ell, idx + 1))] = c
    return Element(sig, terms)


class InnerExp:
    """sigma_u = exp(ad u) for u in A, stored with its constant term dropped
    (sigma_{u+c} = sigma_u)."""

    __slots__ = ("signature", "u")

    def __init__(self, u: Element):
        if not u.in_A():
            raise NotInA("exp(ad u) requires u with no derivation part")
        self.signature = u.signature
        self.u = u.without_constant()

    def apply(self, w: Element) -> Element:
        if w.signature != self.signature:
            raise SignatureMismatch("element belongs to a different algebra")
        total = self.signature.zero()
        term = w
        s = 0
        bound = (w.max_level() or 0) + 2
        while term:
            total = total + term
            s += 1
            if s > bound:
                raise AssertionError("ad-series failed to terminate")
            term = self.u.bracket(term) / s
        return total

    def inverse(self) -> "InnerExp":
        return InnerExp(-self.u)

    def is_identity(self) -> bool:
        return self.u.is_zero

    @classmethod
    def identity(cls, sig: Signature) -> "InnerExp":
        return cls(sig.zero())

    def __eq__(self, other):
        if not isinstance(other, InnerExp):
            return NotImplemented
        return self.u == other.u

    def __repr__(self):
        return f"InnerExp({self.u!r})"


class ShiftV:
    """sigma_v: fixes every x^a, shifts the polynomial generator row by the
    first l1 slots of v and the derivation row by the last l2 slots."""

    __slots__ = ("signature", "v")

    def __init__(self, signature: Signature, v):
        vv = tuple(as_fraction(x) for x in v)
        if len(vv) != signature.ell:
            raise DimensionMismatch("shift vector length differs from l")
        self.signature = signature
        self.v = vv

    def apply(self, w: Element) -> Element:
        if w.signature != self.signature:
            raise SignatureMismatch("element belongs to a different algebra")
        sig = self.signature
        zero = (0,) * sig.ell

        def x_image(al):
            return Element(sig, {Monomial(al, zero, zero): Fraction(1)})

        x1_images = [sig.x_poly(p + 1) + sig.scalar(self.v[p])
                     for p in range(sig.ell1)]
        d_images = [sig.d(q + 1) + sig.scalar(self.v[q]) if q >= sig.ell1
                    else sig.d(q + 1)
                    for q in range(sig.ell)]
        return _hom_extend(w, sig, x_image, x1_images, d_images)

    def inverse(self) -> "ShiftV":
        return ShiftV(self.signature, tuple(-x for x in self.v))

    def is_identity(self) -> bool:
        return all(x == 0 for x in self.v)

    @classmethod
    def identity(cls, sig: Signature) -> "ShiftV":
        return cls(sig, (Fraction(0),) * sig.ell)

    def __eq__(self, other):
        if not isinstance(other, ShiftV):
            return NotImplemented
        return (self.signature, self.v) == (other.signature, other.v)

    def __repr__(self):
        return f"ShiftV({', '.join(map(rational_str, self.v))})"


def apply_sigma1(sig: Signature, w: Element) -> Element:
    """x^{a,i} d^mu -> -(-d)^mu . x^{a,i}, extended linearly.

    Preserves the bracket, squares to the identity, and is not an
    automorphism of the associative product.
    """
    if w.signature != sig:
        raise SignatureMismatch("element belongs to a different algebra")
    zero = (0,) * sig.ell
    out = sig.zero()
    for (al, i, mu), c in w.terms.items():
        d_part = Element(sig, {Monomial(zero, zero, mu): Fraction(1)})
        a_part = Element(sig, {Monomial(al, i, zero): Fraction(1)})
        sign = -((-1) ** sum(mu))
        out = out + (d_part * a_part).scale(c * sign)
    return out


class Sigma1:
    """Callable wrapper so the twist composes uniformly with the families."""

    __slots__ = ("signature",)

    def __init__(self, signature: Signature):
        self.signature = signature

    def apply(self, w: Element) -> Element:
        return apply_sigma1(self.signature, w)


# ---------------------------------------------------------------------------
# normal form and the group law
# ---------------------------------------------------------------------------

@dataclass
class NormalFormAut:
    """The factored automorphism sigma_tau . sigma_u . sigma_v . sigma_1^eps."""

    tau: TauAut
    u: InnerExp
    v: ShiftV
    eps: int = 0
    mode: str = MODE_LIE

    def __post_init__(self):
        sig = self.tau.signature
        if self.u.signature != sig or self.v.signature != sig:
            raise SignatureMismatch("normal form factors disagree on the algebra")
        if self.eps not in (0, 1):
            raise ValueError("eps must be 0 or 1")
        if self.mode not in (MODE_LIE, MODE_ASSOC):
            raise ValueError("mode must be 'lie' or 'assoc'")
        if self.eps == 1 and self.mode == MODE_ASSOC:
            raise ValueError("the order-2 twist is not associative-mode")

    @property
    def signature(self) -> Signature:
        return self.tau.signature

    def apply(self, w: Element) -> Element:
        if self.eps:
            w = apply_sigma1(self.signature, w)
        return self.tau.apply(self.u.apply(self.v.apply(w)))

    @classmethod
    def identity(cls, sig: Signature, mode: str = MODE_LIE) -> "NormalFormAut":
        return cls(TauAut.identity(sig), InnerExp.identity(sig),
                   ShiftV.identity(sig), 0, mode)

    def is_identity(self) -> bool:
        return (self.tau.is_identity() and self.u.is_identity()
                and self.v.is_identity() and self.eps == 0)

    def same_data(self, other: "NormalFormAut") -> bool:
        """Equality of the factored data (mode is metadata and ignored)."""
        return (self.tau == other.tau and self.u == other.u
                and self.v == other.v and self.eps == other.eps)

    def to_dict(self) -> dict:
        return {
            "tau": {
                "G": [[rational_str(x) for x in row] for row in self.tau.G.entries],
                "f": [rational_str(x) for x in self.tau.f.values],
            },
            "u": element_to_dict(self.u.u),
            "v": [rational_str(x) for x in self.v.v],
            "eps": self.eps,
            "mode": self.mode,
        }

    @classmethod
    def from_dict(cls, data: dict, signature: Signature | None = None) -> "NormalFormAut":
        u_elem = element_from_dict(data["u"], signature)
        sig = u_elem.signature
        G = BlockMatrix(sig.ell1, sig.ell2,
                        [[as_fraction(x) for x in row] for row in data["tau"]["G"]])
        f = Character(sig.lattice, [as_fraction(x) for x in data["tau"]["f"]])
        v = ShiftV(sig, [as_fraction(x) for x in data["v"]])
        return cls(TauAut(sig, G, f), InnerExp(u_elem), v,
                   int(data.get("eps", 0)), data.get("mode", MODE_LIE))


def conjugated_shift(tau: TauAut, v: ShiftV) -> tuple[InnerExp, ShiftV]:
    """sigma_tau^{-1} . sigma_v . sigma_tau as an inner-exp then a shift.

    The shift vector is v . ((M^t)^{-1} (+) Q); the inner part is
    -(v's derivation slots) P applied to the polynomial generators.
    """
    sig = tau.signature
    ell1, ell2 = sig.ell1, sig.ell2
    v1, v2 = v.v[:ell1], v.v[ell1:]
    moved1 = linalg.vec_mat(v1, tau.G.m_transpose_inverse()) if ell1 else ()
    moved2 = linalg.vec_mat(v2, tau.G.block_Q) if ell2 else ()
    inner = sig.zero()
    if ell1 and ell2:
        coeffs = linalg.vec_mat(v2, tau.G.block_P)
        for p in range(ell1):
            if coeffs[p]:
                inner = inner + sig.x_poly(p + 1, coeff=-coeffs[p])
    return InnerExp(inner), ShiftV(sig, tuple(moved1) + tuple(moved2))


def compose_normal_forms(a: NormalFormAut, b: NormalFormAut,
                         _verify: bool = True) -> NormalFormAut:
    """The normal form of a after b, computed symbolically.

    Requires eps = 0 on both sides; compositions involving the order-2 twist
    go through functional form plus decomposition instead.  The result is
    checked against sequential application on the generating set.
    """
    if a.eps or b.eps:
        raise Sigma1NotSupported("compose the twist functionally, then decompose")
    if a.signature != b.signature:
        raise SignatureMismatch("normal forms belong to different algebras")
    sig = a.signature
    tau = a.tau.compose(b.tau)
    inner_conj, moved_shift = conjugated_shift(b.tau, a.v)
    u_elem = (b.tau.inverse().apply(a.u.u)
              + moved_shift.apply(b.u.u)
              + inner_conj.u)
    v = ShiftV(sig, tuple(x + y for x, y in zip(moved_shift.v, b.v.v)))
    mode = a.mode if a.mode == b.mode else MODE_LIE
    result = NormalFormAut(tau, InnerExp(u_elem), v, 0, mode)
    if _verify:
        for key in generator_keys(sig):
            gen = generator_element(sig, key)
            if result.apply(gen) != a.apply(b.apply(gen)):
                raise AssertionError(f"group law violated on generator {key}")
    return result


# ---------------------------------------------------------------------------
# extensional presentation
# ---------------------------------------------------------------------------

class FunctionalAut:
    """An automorphism given by its images on the generating set.

    The stored images cover the unit, x^{+-b_k} for each canonical basis row,
    the polynomial generators and the derivations.  Application to arbitrary
    elements goes through decomposition into normal form.
    """

    __slots__ = ("signature", "mode", "images", "_normal_form")

    def __init__(self, signature: Signature, mode: str, images: dict):
        if mode not in (MODE_LIE, MODE_ASSOC):
            raise ValueError("mode must be 'lie' or 'assoc'")
        expected = set(generator_keys(signature))
        if set(images) != expected:
            missing = expected - set(images)
            extra = set(images) - expected
            raise KeyError(f"generator images missing={missing} extra={extra}")
        for key, e in images.items():
            if e.signature != signature:
                raise SignatureMismatch(f"image of {key} lives in another algebra")
        if mode == MODE_ASSOC:
            one = signature.one()
            for k in range(1, signature.ell + 1):
                prod = images[("x", k, 1)] * images[("x", k, -1)]
                if prod != one:
                    raise NotAnAutomorphism(
                        f"images of x^{{+-b_{k}}} do not multiply to 1")
        self.signature = signature
        self.mode = mode
        self.images = dict(images)
        self._normal_form = None

    @classmethod
    def from_aut(cls, aut, mode: str | None = None) -> "FunctionalAut":
        sig = aut.signature
        mode = mode if mode is not None else getattr(aut, "mode", MODE_LIE)
        images = {key: aut.apply(generator_element(sig, key))
                  for key in generator_keys(sig)}
        return cls(sig, mode, images)

    def image(self, key: tuple) -> Element:
        return self.images[key]

    def as_normal_form(self) -> NormalFormAut:
        if self._normal_form is None:
            self._normal_form = decompose_automorphism(self, _force_lie=True)
        return self._normal_form

    def apply(self, w: Element) -> Element:
        return self.as_normal_form().apply(w)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "signature": self.signature.to_dict(),
            "images": {_gen_label(k): element_to_dict(e)
                       for k, e in sorted(self.images.items(), key=lambda kv: _gen_label(kv[0]))},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FunctionalAut":
        sig = Signature.from_dict(data["signature"])
        images = {_gen_key_from_label(lbl): element_from_dict(e, sig)
                  for lbl, e in data["images"].items()}
        return cls(sig, data.get("mode", MODE_LIE), images)


# ---------------------------------------------------------------------------
# randomized verification
# ---------------------------------------------------------------------------

@dataclass
class VerifyReport:
    passed: bool
    mode: str
    trials: int
    seed: int
    counterexample: dict | None = field(default=None, repr=False)

    def describe(self) -> str:
        if self.passed:
            return f"pass ({self.trials} random pairs, mode={self.mode}, seed={self.seed})"
        ce = self.counterexample
        return (f"fail at trial {ce['trial']} (mode={self.mode}, seed={self.seed}): "
                f"phi(a op b) != phi(a) op phi(b)")


def verify_automorphism(phi, trials: int, seed: int, mode: str | None = None) -> VerifyReport:
    """Sample element pairs and check the homomorphism law in the given mode."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sig = phi.signature
    mode = mode if mode is not None else getattr(phi, "mode", MODE_LIE)
    rng = random.Random(seed)
    for trial in range(1, trials + 1):
        a = random_element(sig, rng)
        b = random_element(sig, rng)
        if mode == MODE_ASSOC:
            lhs = phi.apply(a * b)
            rhs = phi.apply(a) * phi.apply(b)
        else:
            lhs = phi.apply(a.bracket(b))
            rhs = phi.apply(a).bracket(phi.apply(b))
        if lhs != rhs:
            return VerifyReport(False, mode, trials, seed,
                                {"trial": trial, "a": a, "b": b,
                                 "lhs": lhs, "rhs": rhs})
    return VerifyReport(True, mode, trials, seed)


# ---------------------------------------------------------------------------
# decomposition into normal form
# ---------------------------------------------------------------------------

def _solve_d_preimage(sig: Signature, q: int, al, i, c) -> dict:
    """Terms of u with d_q(u) = c x^{al,i}, valid when ambient alpha_q != 0.

    Repeatedly divides by the grading eigenvalue and pushes the lowering
    remainder down in i_q; terminates after i_q + 1 steps.
    """
    aq = sig.lattice.ambient(al)[q]
    out: dict = {}
    cur_c, cur_i = c, i
    while True:
        key = (al, cur_i)
        out[key] = out.get(key, Fraction(0)) + cur_c / aq
        if q >= sig.ell1 or cur_i[q] == 0:
            return out
        lowered = list(cur_i)
        lowered[q] -= 1
        cur_c = -cur_c * cur_i[q] / aq
        cur_i = tuple(lowered)


def decompose_automorphism(phi: FunctionalAut, _force_lie: bool = False) -> NormalFormAut:
    """Recover the normal form sigma_tau sigma_u sigma_v sigma_1^eps from
    generator images.

    Peels the factored form left to right: (1) the lattice matrix G off the
    derivation images, (2) the inner and shift corrections that straighten
    every derivation image (one coordinate at a time, integrating the graded
    part exactly and the degree-zero part either into a polynomial primitive
    or into a derivation shift), (3) the character and the sign c0 off the
    x-images and the unit image, (4) the twist when c0 = -1, and (5) the
    polynomial shift off the x^{1_[p]} images.  Raises NotAnAutomorphism as
    soon as any image violates the shape this factorization forces.
    """
    sig = phi.signature
    ell, ell1 = sig.ell, sig.ell1
    zero = (0,) * ell
    images = dict(phi.images)
    factors: list[NormalFormAut] = []

    def peel(aut, inverse_factor: NormalFormAut):
        for key in images:
            images[key] = aut.apply(images[key])
        factors.append(inverse_factor)

    # (1) the lattice matrix off the derivation images
    g_cols = []
    for q in range(1, ell + 1):
        image = images[("d", q)]
        col = [Fraction(0)] * ell
        for (al, i, mu), c in image.terms.items():
            lvl = sum(mu)
            if lvl > 1:
                raise NotAnAutomorphism(f"image of d{q} has a level-{lvl} term")
            if lvl == 1:
                if al != zero or any(i):
                    raise NotAnAutomorphism(f"image of d{q} is outside D + A")
                col[mu.index(1)] = c
        g_cols.append(col)
    entries = tuple(tuple(g_cols[q][p] for q in range(ell)) for p in range(ell))
    try:
        G = BlockMatrix(sig.ell1, sig.ell2, entries)
    except Exception as exc:
        raise NotAnAutomorphism(f"derivation images give no block matrix: {exc}") from exc
    if not aut2_membership(sig.lattice, G):
        raise NotAnAutomorphism("derivation images do not stabilize the lattice")
    tau_g = TauAut(sig, G, Character.trivial(sig.lattice))
    peel(tau_g.inverse(), NormalFormAut(tau_g, InnerExp.identity(sig),
                                        ShiftV.identity(sig)))

    # (2) straighten the derivation images one coordinate at a time
    for q0 in range(ell):
        q = q0 + 1
        w_q = images[("d", q)] - sig.d(q)
        if not w_q.in_A():
            raise NotAnAutomorphism(f"image of d{q} did not reduce to d{q} + A")
        graded = {}
        flat = {}
        for (al, i, mu), c in w_q.terms.items():
            if sig.lattice.ambient(al)[q0] != 0:
                graded[(al, i)] = c
            else:
                flat[(al, i)] = c
        if graded:
            u_terms: dict = {}
            for (al, i), c in graded.items():
                for key, val in _solve_d_preimage(sig, q0, al, i, c).items():
                    u_terms[key] = u_terms.get(key, Fraction(0)) + val
            u_prime = Element(sig, {Monomial(al, i, zero): c
                                    for (al, i), c in u_terms.items()})
            inner = InnerExp(u_prime)
            peel(inner, NormalFormAut(TauAut.identity(sig), inner.inverse(),
                                      ShiftV.identity(sig)))
        if flat:
            if q0 < ell1:
                u_terms = {}
                for (al, i), c in flat.items():
                    raised = list(i)
                    raised[q0] += 1
                    u_terms[Monomial(al, tuple(raised), zero)] = c / (i[q0] + 1)
                inner = InnerExp(Element(sig, u_terms))
                peel(inner, NormalFormAut(TauAut.identity(sig), inner.inverse(),
                                          ShiftV.identity(sig)))
            else:
                if set(flat) != {(zero, zero)}:
                    raise NotAnAutomorphism(
                        f"image of d{q} has a non-constant degree-0 part")
                c = flat[(zero, zero)]
                vec = [Fraction(0)] * ell
                vec[q0] = -c
                shift = ShiftV(sig, vec)
                peel(shift, NormalFormAut(TauAut.identity(sig),
                                          InnerExp.identity(sig), shift.inverse()))
        if images[("d", q)] != sig.d(q):
            raise NotAnAutomorphism(f"image of d{q} could not be straightened")

    # (3) the sign c0 and the character off the unit and x-images
    unit = images[("one",)]
    if set(unit.terms) != {Monomial(zero, zero, zero)}:
        raise NotAnAutomorphism("image of the unit is not scalar")
    c0 = unit.constant_coefficient()
    if c0 not in (Fraction(1), Fraction(-1)):
        raise NotAnAutomorphism(f"unit scales by {c0}, expected +-1")
    f_values = []
    for k in range(1, ell + 1):
        coeffs = {}
        for s in (1, -1):
            image = images[("x", k, s)]
            expected = Monomial(unit_index(ell, k, s), zero, zero)
            if set(image.terms) != {expected}:
                raise NotAnAutomorphism(
                    f"image of x^{{{'+' if s > 0 else '-'}b_{k}}} is not a scalar multiple")
            coeffs[s] = image.terms[expected]
        if coeffs[1] * coeffs[-1] != c0 * c0:
            raise NotAnAutomorphism(
                f"images of x^{{+-b_{k}}} violate multiplicativity")
        f_values.append(coeffs[1] / c0)
    f = Character(sig.lattice, f_values)
    tau_f = TauAut(sig, BlockMatrix.identity(sig.ell1, sig.ell2), f)
    peel(tau_f.inverse(), NormalFormAut(tau_f, InnerExp.identity(sig),
                                        ShiftV.identity(sig)))

    # (4) the twist
    eps = 0
    if c0 == -1:
        eps = 1
        if not _force_lie and phi.mode == MODE_ASSOC:
            raise NotAnAutomorphism(
                "associative-mode data decomposes with the order-2 twist")
        twist = Sigma1(sig)
        for key in images:
            images[key] = twist.apply(images[key])

    # (5) the polynomial shift off the x^{1_[p]} images
    if ell1:
        shift_vec = [Fraction(0)] * ell
        for p in range(1, ell1 + 1):
            image = images[("xi", p)]
            gen_key = Monomial(zero, unit_index(ell, p), zero)
            extra = dict(image.terms)
            if extra.pop(gen_key, None) != Fraction(1):
                raise NotAnAutomorphism(
                    f"image of x^{{1_[{p}]}} has no unit x^{{1_[{p}]}} part")
            const = extra.pop(Monomial(zero, zero, zero), Fraction(0))
            if extra:
                raise NotAnAutomorphism(
                    f"image of x^{{1_[{p}]}} has stray terms {sorted(extra)}")
            shift_vec[p - 1] = const
        if any(shift_vec):
            fix = ShiftV(sig, tuple(-x for x in shift_vec))
            for key in images:
                images[key] = fix.apply(images[key])
            factors.append(NormalFormAut(TauAut.identity(sig),
                                         InnerExp.identity(sig), fix.inverse()))

    for key in images:
        if images[key] != generator_element(sig, key):
            raise NotAnAutomorphism(f"residual map moves generator {key}")

    result = NormalFormAut.identity(sig)
    for factor in factors:
        result = compose_normal_forms(result, factor, _verify=False)
    result = NormalFormAut(result.tau, result.u, result.v, eps,
                           MODE_LIE if eps else phi.mode)
    for key in generator_keys(sig):
        if result.apply(generator_element(sig, key)) != phi.images[key]:
            raise NotAnAutomorphism(f"reassembled form disagrees on generator {key}")
    return result


def compose_automorphisms(a: NormalFormAut, b: NormalFormAut) -> NormalFormAut:
    """a after b; symbolic when neither carries the twist, functional otherwise."""
    if a.eps == 0 and b.eps == 0:
        return compose_normal_forms(a, b)
    sig = a.signature
    if sig != b.signature:
        raise SignatureMismatch("normal forms belong to different algebras")
    images = {key: a.apply(b.apply(generator_element(sig, key)))
              for key in generator_keys(sig)}
    return decompose_automorphism(FunctionalAut(sig, MODE_LIE, images))


def random_normal_form_aut(sig: Signature, rng: random.Random,
                           allow_eps: bool = True,
                           mode: str = MODE_LIE) -> NormalFormAut:
    """A random factored automorphism for round-trip and group-law checks."""
    from .sampling import (
        random_A_element,
        random_aut2,
        random_character,
        random_shift_vector,
    )

    tau = TauAut(sig, random_aut2(sig, rng), random_character(sig.lattice, rng))
    u = InnerExp(random_A_element(sig, rng))
    v = ShiftV(sig, random_shift_vector(sig, rng))
    eps = rng.randint(0, 1) if allow_eps and mode == MODE_LIE else 0
    return NormalFormAut(tau, u, v, eps, mode)
