import random
from fractions import Fraction

import pytest

from flatbif import ratmat as rm
from flatbif.crystal import (CollapseFamily, CrystalGroup, collapse_map,
                             cone_membership, conjugate_group,
                             find_invariant_subspace, is_torsion_free,
                             validate_group)
from flatbif.errors import (InvalidGroup, InvalidInput, IrreducibleUnexpected,
                            NotIsometricAction)
from flatbif.lattices import Lattice, same_point_set

from conftest import affine, torsion_corpus
from oracles import brute_force_has_torsion


class TestAffineMap:
    def test_composition_law(self):
        a = affine([["0", "-1"], ["1", "0"]], ["1/2", "0"])
        b = affine([["1", "0"], ["0", "-1"]], ["0", "1/3"])
        ab = a.compose(b)
        assert ab.linear == rm.mat_mul(a.linear, b.linear)
        assert ab.translation == rm.vec_add(
            rm.mat_vec(a.linear, b.translation), a.translation)

    def test_inverse(self):
        a = affine([["0", "-1"], ["1", "0"]], ["1/2", "2/3"])
        ident = a.compose(a.inverse())
        assert ident.linear == rm.identity(2)
        assert not any(ident.translation)

    def test_orthogonality_flag(self):
        assert affine([["0", "-1"], ["1", "0"]], ["0", "0"]).is_orthogonal()
        assert not affine([["2", "0"], ["0", "1"]], ["0", "0"]).is_orthogonal()


class TestValidation:
    def test_torus_valid(self):
        assert validate_group(CrystalGroup.torus(Lattice.standard(2))).ok

    def test_klein_valid(self, klein):
        assert validate_group(klein).ok

    def test_klein_wrong_lattice_invalid(self):
        bad = CrystalGroup(
            Lattice(rm.mat([["2", "0"], ["0", "1"]])),
            (affine([["1", "0"], ["0", "-1"]], ["1/2", "0"]),))
        report = validate_group(bad)
        assert not report.ok
        kinds = {f.kind for f in report.failures}
        assert "coset_not_closed" in kinds
        witness = next(f for f in report.failures
                       if f.kind == "coset_not_closed")
        assert witness.witness == (1, 1)

    def test_lattice_not_preserved(self):
        bad = CrystalGroup(
            Lattice(rm.mat([["1", "0"], ["0", "2"]])),
            (affine([["0", "-1"], ["1", "0"]], ["0", "0"]),))
        report = validate_group(bad)
        assert any(f.kind == "lattice_not_preserved" for f in report.failures)

    def test_nonorthogonal_flagged(self):
        bad = CrystalGroup(
            Lattice.standard(2),
            (affine([["1", "1"], ["0", "1"]], ["0", "0"]),))
        report = validate_group(bad)
        assert any(f.kind == "not_orthogonal" for f in report.failures)

    def test_hw3d_valid(self, hw3d):
        assert validate_group(hw3d).ok


class TestTorsion:
    def test_klein_torsion_free(self, klein):
        assert is_torsion_free(klein).torsion_free

    def test_point_inversion_witness(self):
        group = CrystalGroup(
            Lattice.standard(2),
            (affine([["-1", "0"], ["0", "-1"]], ["0", "0"]),))
        result = is_torsion_free(group)
        assert not result.torsion_free
        assert result.witness.fixed_point == (0, 0)

    def test_shifted_inversion_fixed_point(self):
        group = CrystalGroup(
            Lattice.standard(2),
            (affine([["-1", "0"], ["0", "-1"]], ["1/2", "1/2"]),))
        result = is_torsion_free(group)
        assert not result.torsion_free
        assert result.witness.fixed_point == (Fraction(1, 4), Fraction(1, 4))

    def test_invalid_group_rejected(self):
        bad = CrystalGroup(
            Lattice(rm.mat([["2", "0"], ["0", "1"]])),
            (affine([["1", "0"], ["0", "-1"]], ["1/2", "0"]),))
        with pytest.raises(InvalidGroup):
            is_torsion_free(bad)

    @pytest.mark.parametrize("name,group,expected",
                             torsion_corpus(),
                             ids=[c[0] for c in torsion_corpus()])
    def test_matches_fixed_point_oracle(self, name, group, expected):
        result = is_torsion_free(group)
        assert result.torsion_free == expected
        assert brute_force_has_torsion(group) == (not expected)
        if not result.torsion_free:
            # the witness really is fixed by the witnessed element
            rep = group.holonomy[result.witness.coset_index]
            moved = rm.vec_add(rm.mat_vec(rep.linear, result.witness.fixed_point),
                               rm.vec_add(rep.translation,
                                          result.witness.lattice_shift))
            assert moved == result.witness.fixed_point


class TestCone:
    def test_orthogonal_always_member(self, klein):
        rot = rm.mat([["0", "-1"], ["1", "0"]])
        assert cone_membership(klein, rot)

    def test_diagonal_member(self, klein):
        assert cone_membership(klein, rm.mat([["2", "0"], ["0", "3"]]))

    def test_shear_not_member(self, klein):
        assert not cone_membership(klein, rm.mat([["1", "1"], ["0", "1"]]))

    def test_singular_rejected(self, klein):
        with pytest.raises(InvalidInput):
            cone_membership(klein, rm.mat([["1", "1"], ["1", "1"]]))

    def test_inverse_transpose_closure(self, klein, hw3d):
        rng = random.Random(3)
        for group in (klein, hw3d):
            d = group.dim
            for _ in range(20):
                mat = rm.mat([[Fraction(rng.randint(-3, 3), rng.randint(1, 2))
                               for _ in range(d)] for _ in range(d)])
                if rm.det(mat) == 0:
                    continue
                lhs = cone_membership(group, mat)
                rhs = cone_membership(group, rm.inverse(rm.transpose(mat)))
                assert lhs == rhs


class TestInvariantSubspace:
    def test_trivial_holonomy_first_axis(self):
        p = find_invariant_subspace(CrystalGroup.torus(Lattice.standard(2)))
        assert p == rm.mat([["1", "0"], ["0", "0"]])

    def test_klein_first_axis(self, klein):
        p = find_invariant_subspace(klein)
        assert p == rm.mat([["1", "0"], ["0", "0"]])

    def test_hw3d_axis(self, hw3d):
        p = find_invariant_subspace(hw3d)
        assert p == rm.mat([["1", "0", "0"], ["0", "0", "0"], ["0", "0", "0"]])

    def test_projection_properties(self, klein, hw3d):
        for group in (klein, hw3d):
            p = find_invariant_subspace(group)
            assert rm.mat_mul(p, p) == p
            assert rm.transpose(p) == p
            for b in group.linear_parts():
                assert rm.mat_mul(b, p) == rm.mat_mul(p, b)

    def test_irreducible_reported(self):
        # 4-fold rotation acts irreducibly over the rationals on the plane
        group = CrystalGroup(
            Lattice.standard(2),
            (affine([["0", "-1"], ["1", "0"]], ["0", "0"]),
             affine([["-1", "0"], ["0", "-1"]], ["0", "0"]),
             affine([["0", "1"], ["-1", "0"]], ["0", "0"])))
        assert validate_group(group).ok
        with pytest.raises(IrreducibleUnexpected):
            find_invariant_subspace(group)

    def test_dimension_guard(self):
        with pytest.raises(InvalidInput):
            find_invariant_subspace(CrystalGroup.torus(Lattice.standard(1)))


class TestCollapse:
    def test_identity_at_one(self, klein):
        family = CollapseFamily.auto(klein)
        assert collapse_map(family, 1) == rm.identity(2)

    def test_half(self, klein):
        family = CollapseFamily.auto(klein)
        assert collapse_map(family, Fraction(1, 2)) == rm.mat(
            [["2", "0"], ["0", "1/2"]])

    def test_unit_determinant_random(self, hw3d):
        rng = random.Random(17)
        family = CollapseFamily.auto(hw3d)
        for _ in range(50):
            t = Fraction(rng.randint(1, 64), 2 ** rng.randint(0, 6))
            a = collapse_map(family, t)
            assert rm.det(a) == 1
            assert cone_membership(hw3d, a)

    def test_one_parameter_group_law(self, klein):
        family = CollapseFamily.auto(klein)
        rng = random.Random(29)
        for _ in range(25):
            t = Fraction(rng.randint(1, 32), 2 ** rng.randint(0, 5))
            s = Fraction(rng.randint(1, 32), 2 ** rng.randint(0, 5))
            assert rm.mat_mul(collapse_map(family, t), collapse_map(family, s)) \
                == collapse_map(family, t * s)

    def test_nonpositive_t(self, klein):
        family = CollapseFamily.auto(klein)
        with pytest.raises(InvalidInput):
            collapse_map(family, 0)

    def test_subspace_validation(self, klein):
        # span{(1,1)} is not invariant under the holonomy reflection
        with pytest.raises(InvalidInput):
            CollapseFamily.from_subspace_basis(klein, [["1", "1"]])
        with pytest.raises(InvalidInput):
            CollapseFamily.from_subspace_basis(klein, [["1", "0"], ["0", "1"]])


class TestConjugation:
    def test_identity(self, klein):
        out = conjugate_group(klein, rm.identity(2))
        assert out == klein

    def test_klein_squeeze(self, klein):
        t = Fraction(1, 2)
        a = rm.mat([[1 / t, 0], [0, t]])
        out = conjugate_group(klein, a)
        assert same_point_set(out.lattice,
                              Lattice(rm.mat([[1 / t, 0], [0, t]])))
        rep = out.holonomy[1]
        assert rep.linear == rm.mat([["1", "0"], ["0", "-1"]])
        assert rep.translation == (Fraction(1, 2) / t, 0)

    def test_torus_rescale(self):
        torus = CrystalGroup.torus(Lattice.standard(2))
        out = conjugate_group(torus, rm.mat([["2", "0"], ["0", "1/2"]]))
        assert same_point_set(out.lattice,
                              Lattice(rm.mat([["2", "0"], ["0", "1/2"]])))

    def test_cone_violation_rejected(self, klein):
        with pytest.raises(NotIsometricAction):
            conjugate_group(klein, rm.mat([["1", "1"], ["0", "1"]]))

    def test_preserves_validity_and_torsion(self, klein, hw3d):
        rng = random.Random(41)
        for group in (klein, hw3d):
            family = CollapseFamily.auto(group)
            for _ in range(10):
                t = Fraction(rng.randint(1, 16), 2 ** rng.randint(0, 4))
                out = conjugate_group(group, collapse_map(family, t))
                assert validate_group(out).ok
                assert is_torsion_free(out).torsion_free

    def test_with_translation_part(self, klein):
        out = conjugate_group(klein, rm.identity(2), rm.vec(["1/3", "1/5"]))
        assert validate_group(out).ok
        assert is_torsion_free(out).torsion_free
