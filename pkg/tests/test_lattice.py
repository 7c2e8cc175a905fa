import json
import random
from fractions import Fraction

import pytest

from weyltype import (
    BlockMatrix,
    Character,
    Lattice,
    aut2_membership,
    char_eval,
    dual_derivation_basis,
    lattice_from_generators,
    pairing,
)
from weyltype.errors import (
    BlockShapeViolation,
    DimensionMismatch,
    EmptyGenerators,
    NondegenerateViolation,
    NotMember,
    SingularBasis,
    SingularMatrix,
)
from weyltype.linalg import unimodular_matrices, vec_mat


def _rows(lat):
    return tuple(tuple(x for x in row) for row in lat.basis)


class TestLatticeFromGenerators:
    def test_redundant_generators_reduce_to_identity(self):
        lat = lattice_from_generators(2, [(1, 0), (0, 1), (1, 1)])
        assert _rows(lat) == ((1, 0), (0, 1))

    def test_gcd_in_rank_one(self):
        lat = lattice_from_generators(1, [(2,), (3,)])
        assert _rows(lat) == ((1,),)

    def test_rank_deficiency_rejected(self):
        with pytest.raises(NondegenerateViolation):
            lattice_from_generators(2, [(1, 0)])

    def test_empty_generators_rejected(self):
        with pytest.raises(EmptyGenerators):
            lattice_from_generators(2, [])

    def test_wrong_length_generator_rejected(self):
        with pytest.raises(DimensionMismatch):
            lattice_from_generators(2, [(1, 0, 0), (0, 1, 0)])

    def test_half_integer_lattice(self):
        lat = lattice_from_generators(2, [(1, 0), (0, 1), (Fraction(1, 2), Fraction(1, 2))])
        assert _rows(lat) == ((Fraction(1, 2), Fraction(1, 2)), (0, 1))
        assert lat.denominator == 2

    def test_canonicity_under_unimodular_remix(self):
        rng = random.Random(5)
        base = lattice_from_generators(2, [(Fraction(1, 3), 0), (Fraction(1, 6), 1)])
        mixers = [m for _, m in zip(range(40), unimodular_matrices(2, 2))]
        for _ in range(25):
            mix = rng.choice(mixers)
            gens = [vec_mat(row, base.basis) for row in mix]
            extra = tuple(a + b for a, b in zip(gens[0], gens[1]))
            remixed = lattice_from_generators(2, gens + [extra])
            assert remixed.basis == base.basis
            assert remixed == base


class TestCoordinates:
    def test_identity_basis(self):
        lat = lattice_from_generators(2, [(1, 0), (0, 1)])
        assert lat.coordinates((3, -2)) == (3, -2)

    def test_scaled_basis(self):
        lat = lattice_from_generators(2, [(Fraction(1, 2), 0), (0, 1)])
        assert lat.coordinates((Fraction(3, 2), 1)) == (3, 1)

    def test_non_member(self):
        lat = lattice_from_generators(2, [(1, 0), (0, 1)])
        assert lat.coordinates((Fraction(1, 2), 0)) is None

    def test_dimension_mismatch(self):
        lat = lattice_from_generators(2, [(1, 0), (0, 1)])
        with pytest.raises(DimensionMismatch):
            lat.coordinates((1, 0, 0))

    def test_ambient_inverts_coordinates(self):
        lat = lattice_from_generators(2, [(1, 0), (0, 1), (Fraction(1, 2), Fraction(1, 2))])
        rng = random.Random(3)
        for _ in range(20):
            n = (rng.randint(-4, 4), rng.randint(-4, 4))
            assert lat.coordinates(lat.ambient(n)) == n


class TestDualBasis:
    def test_standard_unit_vectors(self):
        lat = lattice_from_generators(2, [(1, 0), (0, 1)])
        C = dual_derivation_basis(lat, [(1, 0), (0, 1)])
        assert C == ((1, 0), (0, 1))

    def test_rank_one_scaling(self):
        lat = lattice_from_generators(1, [(2,)])
        C = dual_derivation_basis(lat, [(2,)])
        assert C == ((Fraction(1, 2),),)

    def test_two_dimensional_example(self):
        lat = lattice_from_generators(2, [(1, 1), (0, 1)])
        C = dual_derivation_basis(lat, [(1, 1), (0, 1)])
        assert C == ((1, 0), (-1, 1))

    def test_dependent_points_rejected(self):
        lat = lattice_from_generators(2, [(1, 0), (0, 1)])
        with pytest.raises(SingularBasis):
            dual_derivation_basis(lat, [(1, 1), (2, 2)])

    def test_duality_property(self):
        rng = random.Random(11)
        lat = lattice_from_generators(2, [(1, 0), (0, 1), (Fraction(1, 2), Fraction(1, 2))])
        for _ in range(15):
            alphas = None
            while alphas is None:
                cand = [lat.ambient((rng.randint(-3, 3), rng.randint(-3, 3)))
                        for _ in range(2)]
                try:
                    C = dual_derivation_basis(lat, cand)
                    alphas = cand
                except SingularBasis:
                    continue
            for p in range(2):
                for q in range(2):
                    assert pairing(alphas[p], C[q]) == (1 if p == q else 0)


class TestPairing:
    def test_unit_vectors(self):
        assert pairing((1, 0), (1, 0)) == 1

    def test_mixed(self):
        assert pairing((2, 3), (1, -1)) == -1

    def test_zero(self):
        assert pairing((0, 0), (5, -7)) == 0

    def test_bilinear_and_symmetric_roles(self):
        rng = random.Random(2)
        for _ in range(20):
            a = tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(3))
            b = tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(3))
            c = tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(3))
            assert pairing(a, b) == pairing(b, a)
            ab = tuple(x + y for x, y in zip(a, b))
            assert pairing(ab, c) == pairing(a, c) + pairing(b, c)

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatch):
            pairing((1, 0), (1, 0, 0))


class TestBlockMatrix:
    def test_shape_violation(self):
        with pytest.raises(BlockShapeViolation):
            BlockMatrix(1, 1, [[1, 1], [0, 1]])

    def test_singular_block(self):
        with pytest.raises(SingularMatrix):
            BlockMatrix(1, 1, [[0, 0], [1, 1]])

    def test_blocks(self):
        G = BlockMatrix(1, 1, [[2, 0], [3, 5]])
        assert G.block_M == ((2,),)
        assert G.block_P == ((3,),)
        assert G.block_Q == ((5,),)
        assert G.inverse().entries == ((Fraction(1, 2), 0), (Fraction(-3, 10), Fraction(1, 5)))


class TestAut2Membership:
    def test_integer_transvection(self):
        lat = lattice_from_generators(2, [(1, 0), (0, 1)])
        assert aut2_membership(lat, BlockMatrix(1, 1, [[1, 0], [1, 1]]))

    def test_index_two_image_rejected(self):
        lat = lattice_from_generators(2, [(1, 0), (0, 1)])
        assert not aut2_membership(lat, BlockMatrix(1, 1, [[2, 0], [0, 1]]))

    def test_identity(self):
        lat = lattice_from_generators(2, [(1, 0), (0, 1), (Fraction(1, 2), Fraction(1, 2))])
        assert aut2_membership(lat, BlockMatrix.identity(1, 1))

    def test_group_closure(self, desk):
        from weyltype.sampling import enumerate_aut2

        members = enumerate_aut2(desk, bound=2)
        assert len(members) > 1
        rng = random.Random(9)
        lat = desk.lattice
        for _ in range(25):
            a, b = rng.choice(members), rng.choice(members)
            assert aut2_membership(lat, a.mul(b))
            assert aut2_membership(lat, a.inverse())


class TestCharacter:
    def test_trivial(self):
        lat = lattice_from_generators(2, [(1, 0), (0, 1)])
        f = Character.trivial(lat)
        assert char_eval(f, (3, -5)) == 1

    def test_negative_power(self):
        lat = lattice_from_generators(1, [(1,)])
        f = Character(lat, [2])
        assert char_eval(f, (-3,)) == Fraction(1, 8)

    def test_two_values(self):
        lat = lattice_from_generators(2, [(1, 0), (0, 1)])
        f = Character(lat, [2, 3])
        assert char_eval(f, (1, 1)) == 6

    def test_multiplicative(self):
        rng = random.Random(4)
        lat = lattice_from_generators(2, [(1, 0), (0, 1), (Fraction(1, 2), Fraction(1, 2))])
        f = Character(lat, [Fraction(2, 3), -5])
        for _ in range(25):
            a = lat.ambient((rng.randint(-3, 3), rng.randint(-3, 3)))
            b = lat.ambient((rng.randint(-3, 3), rng.randint(-3, 3)))
            ab = tuple(x + y for x, y in zip(a, b))
            assert char_eval(f, ab) == char_eval(f, a) * char_eval(f, b)

    def test_zero_value_rejected(self):
        lat = lattice_from_generators(1, [(1,)])
        with pytest.raises(ValueError):
            Character(lat, [0])

    def test_non_member_rejected(self):
        lat = lattice_from_generators(1, [(1,)])
        f = Character(lat, [2])
        with pytest.raises(NotMember):
            char_eval(f, (Fraction(1, 2),))


class TestLatticeJson:
    def test_round_trip_bit_exact(self):
        lat = lattice_from_generators(2, [(1, 0), (0, 1), (Fraction(1, 2), Fraction(1, 2))])
        blob = json.dumps(lat.to_dict())
        back = Lattice.from_dict(json.loads(blob))
        assert back == lat
        assert json.dumps(back.to_dict()) == blob

    def test_string_forms(self):
        lat = lattice_from_generators(1, [(Fraction(-3, 2),)])
        assert lat.to_dict() == {"ambient_dim": 1, "generators": [["-3/2"]]}
