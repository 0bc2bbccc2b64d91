import math
import random
from fractions import Fraction

import pytest

from flatbif import ratmat as rm
from flatbif.crystal import CollapseFamily, CrystalGroup, collapse_map, conjugate_group
from flatbif.errors import IncompleteInput, InvalidInput
from flatbif.exactpi import PiRat, ex_float, ex_str
from flatbif.lattices import Lattice, dual
from flatbif.spectra import (DiameterBound, bieberbach_spectrum,
                             cheng_bound_check, flat_diameter,
                             product_spectrum, sphere_spectrum, sphere_volume,
                             torus_spectrum, unit_volume_inv_radius_sq)

from oracles import convolve_spectra, projector_multiplicity

PI2 = math.pi ** 2


def entries_float(slice_):
    return [(ex_float(v), m) for v, m in slice_.entries]


class TestSphere:
    def test_round_two_sphere(self):
        s = sphere_spectrum(2, radius=1, cutoff=20)
        assert [(ex_float(v), m) for v, m in s.entries] == [
            (0.0, 1), (2.0, 3), (6.0, 5), (12.0, 7)]

    def test_round_three_sphere_first_level(self):
        s = sphere_spectrum(3, radius=1, cutoff=4)
        assert entries_float(s)[1] == (3.0, 4)

    def test_constants_always_first(self):
        for m in (2, 3, 4):
            s = sphere_spectrum(m, radius="1/2", cutoff=10)
            assert entries_float(s)[0] == (0.0, 1)

    def test_multiplicity_formula_matches_harmonic_count(self):
        # dimension of degree-j harmonics = C(m+j, j) - C(m+j-2, j-2)
        s = sphere_spectrum(4, radius=1, cutoff=40)
        assert [m for _, m in s.entries] == [1, 5, 14, 30, 55]

    def test_unit_volume_two_sphere(self):
        s = sphere_spectrum(2, cutoff=100, unit_volume=True)
        assert ex_str(s.entries[1][0]) == "8*pi"
        assert s.entries[1][1] == 3

    def test_volume_formula(self):
        assert ex_str(sphere_volume(2)) == "4*pi"
        assert ex_str(sphere_volume(3)) == "2*pi^2"
        assert ex_str(sphere_volume(4)) == "8/3*pi^2"
        assert float(unit_volume_inv_radius_sq(2).to_float()) == pytest.approx(
            4 * math.pi)

    def test_radius_scaling(self):
        s = sphere_spectrum(2, radius=2, cutoff=5)
        assert entries_float(s)[1][0] == pytest.approx(0.5)


class TestTorus:
    def test_circle(self):
        s = torus_spectrum(Lattice.standard(1), 50)
        assert entries_float(s) == [(0.0, 1), (pytest.approx(4 * PI2), 2)]

    def test_square_torus(self):
        s = torus_spectrum(Lattice.standard(2), 100)
        assert [ex_str(v) for v, _ in s.entries] == ["0", "4*pi^2", "8*pi^2"]
        assert [m for _, m in s.entries] == [1, 4, 4]

    def test_squeezed_torus_smallest_eigenvalue(self):
        t = Fraction(1, 2)
        lat = Lattice(rm.mat([[1 / t, 0], [0, t]]))
        s = torus_spectrum(lat, 50)
        # dual vector (1/2, 0) gives 4 pi^2 / 4 = pi^2
        assert ex_str(s.entries[1][0]) == "pi^2"
        assert s.entries[1][1] == 2

    def test_weyl_counting_sanity(self):
        rng = random.Random(13)
        cases = [Lattice.standard(2),
                 Lattice(rm.mat([["2", "0"], ["0", "1/2"]])),
                 Lattice(rm.mat([["1", "1/2"], ["0", "1"]]))]
        for lat in cases:
            assert lat.covolume() == 1
            cutoff = 400
            s = torus_spectrum(lat, cutoff)
            count = s.total_multiplicity()
            predicted = math.pi * cutoff / (4 * PI2)
            assert abs(count / predicted - 1) < 0.2

    def test_enumeration_overflow_propagates(self):
        from flatbif.errors import EnumerationOverflow
        with pytest.raises(EnumerationOverflow):
            torus_spectrum(Lattice.standard(2), 10_000, max_count=5)

    def test_conjugated_lattice_equals_dual_transform(self):
        group = CrystalGroup.torus(Lattice.standard(2))
        family = CollapseFamily.auto(group)
        for t in (Fraction(1, 2), Fraction(3, 4), Fraction(2)):
            a = collapse_map(family, t)
            lhs = torus_spectrum(conjugate_group(group, a).lattice, 200)
            transformed_dual = dual(group.lattice).transformed(
                rm.inverse(rm.transpose(a)))
            rhs = torus_spectrum(dual(transformed_dual), 200)
            assert [(ex_str(v), m) for v, m in lhs.entries] == \
                [(ex_str(v), m) for v, m in rhs.entries]

    def test_laurent_symmetry_under_inversion(self):
        # with dim E = d/2 the spectra at t and 1/t coincide as sets
        group = CrystalGroup.torus(Lattice.standard(2))
        family = CollapseFamily.auto(group)
        for t in (Fraction(1, 3), Fraction(2, 5)):
            a_t = collapse_map(family, t)
            a_inv = collapse_map(family, 1 / t)
            s_t = torus_spectrum(conjugate_group(group, a_t).lattice, 300)
            s_inv = torus_spectrum(conjugate_group(group, a_inv).lattice, 300)
            assert [(ex_str(v), m) for v, m in s_t.entries] == \
                [(ex_str(v), m) for v, m in s_inv.entries]


class TestQuotient:
    def test_torus_group_identical(self):
        lat = Lattice.standard(2)
        a = torus_spectrum(lat, 150)
        b = bieberbach_spectrum(CrystalGroup.torus(lat), 150)
        assert [(ex_str(v), m) for v, m in a.entries] == \
            [(ex_str(v), m) for v, m in b.entries]

    def test_klein_bottle_multiplicities(self, klein):
        s = bieberbach_spectrum(klein, 100)
        assert ex_str(s.entries[0][0]) == "0" and s.entries[0][1] == 1
        assert ex_str(s.entries[1][0]) == "4*pi^2" and s.entries[1][1] == 1
        assert ex_str(s.entries[2][0]) == "8*pi^2" and s.entries[2][1] == 2

    def test_klein_against_projector_oracle(self, klein):
        torus_slice = torus_spectrum(klein.lattice, 200)
        quotient = bieberbach_spectrum(klein, 200)
        dl = dual(klein.lattice)
        dib = rm.inverse(dl.basis)
        from flatbif.lattices import enumerate_short_vectors
        for value, torus_mult in torus_slice.entries[1:]:
            coeff, _ = (value / PiRat.pi_power(4, 2)).monomial() \
                if value.is_monomial() else (None, None)
            svs = enumerate_short_vectors(dl, coeff)
            cls = [c for c, nsq in svs.vectors if nsq == coeff]
            expected = projector_multiplicity(klein, cls)
            assert quotient.multiplicity_of(value) == expected
            assert quotient.multiplicity_of(value) <= torus_mult

    def test_hw3d_first_eigenvalue_killed(self, hw3d):
        # all six dual vectors of norm 1 pair with phase -1 reflections
        s = bieberbach_spectrum(hw3d, 90)
        assert [ex_str(v) for v, _ in s.entries] == ["0", "8*pi^2"]
        torus_slice = torus_spectrum(hw3d.lattice, 90)
        dl = dual(hw3d.lattice)
        from flatbif.lattices import enumerate_short_vectors
        svs = enumerate_short_vectors(dl, 1)
        cls = [c for c, nsq in svs.vectors if nsq == 1]
        assert projector_multiplicity(hw3d, cls) == 0

    def test_hw3d_oracle_agreement(self, hw3d):
        quotient = bieberbach_spectrum(hw3d, 150)
        torus_slice = torus_spectrum(hw3d.lattice, 150)
        dl = dual(hw3d.lattice)
        from flatbif.lattices import enumerate_short_vectors
        for value, torus_mult in torus_slice.entries[1:]:
            coeff = (value / PiRat.pi_power(4, 2)).as_rational()
            svs = enumerate_short_vectors(dl, coeff)
            cls = [c for c, nsq in svs.vectors if nsq == coeff]
            assert quotient.multiplicity_of(value) == \
                projector_multiplicity(hw3d, cls)

    def test_torsion_group_rejected(self):
        from conftest import affine
        orbifold = CrystalGroup(
            Lattice.standard(2),
            (affine([["-1", "0"], ["0", "-1"]], ["0", "0"]),))
        with pytest.raises(InvalidInput):
            bieberbach_spectrum(orbifold, 50)


class TestProduct:
    def test_circle_times_circle(self):
        t1 = torus_spectrum(Lattice.standard(1), 85)
        p = product_spectrum(t1, t1, 40)
        assert [(ex_str(v), m) for v, m in p.entries] == [
            ("0", 1), ("4*pi^2", 4)]
        p2 = product_spectrum(t1, t1, 85)
        assert [(ex_str(v), m) for v, m in p2.entries] == [
            ("0", 1), ("4*pi^2", 4), ("8*pi^2", 4)]

    def test_identity_element(self):
        t2 = torus_spectrum(Lattice.standard(2), 100)
        # tiny sphere: lambda_1 = 200, so the slice below 100 is just (0, 1)
        trivial = sphere_spectrum(2, radius="1/10", cutoff=100)
        assert entries_float(trivial) == [(0.0, 1)]
        p = product_spectrum(trivial, t2, 100)
        assert [(ex_str(v), m) for v, m in p.entries] == \
            [(ex_str(v), m) for v, m in t2.entries]

    def test_sphere_torus_low_cutoff(self):
        s2 = sphere_spectrum(2, cutoff="8/3*pi", unit_volume=True)
        t2 = torus_spectrum(Lattice.standard(2), "8/3*pi")
        p = product_spectrum(s2, t2, "8/3*pi")
        assert entries_float(p) == [(0.0, 1)]

    def test_against_float_convolution(self):
        s2 = sphere_spectrum(2, radius=1, cutoff=60)
        t2 = torus_spectrum(Lattice.standard(2), 60)
        p = product_spectrum(s2, t2, 60)
        expected = convolve_spectra(entries_float(s2), entries_float(t2), 60)
        got = entries_float(p)
        assert len(got) == len(expected)
        for (gv, gm), (ev, em) in zip(got, expected):
            assert gv == pytest.approx(ev)
            assert gm == em

    def test_commutative_and_associative(self):
        a = sphere_spectrum(2, radius=1, cutoff=30)
        b = torus_spectrum(Lattice.standard(1), 30)
        c = sphere_spectrum(3, radius=1, cutoff=30)
        ab = product_spectrum(a, b, 30)
        ba = product_spectrum(b, a, 30)
        assert [(ex_str(v), m) for v, m in ab.entries] == \
            [(ex_str(v), m) for v, m in ba.entries]
        ab_c = product_spectrum(product_spectrum(a, b, 30), c, 30)
        a_bc = product_spectrum(a, product_spectrum(b, c, 30), 30)
        assert [(ex_str(v), m) for v, m in ab_c.entries] == \
            [(ex_str(v), m) for v, m in a_bc.entries]

    def test_incomplete_inputs_rejected(self):
        t1 = torus_spectrum(Lattice.standard(1), 50)
        with pytest.raises(IncompleteInput):
            product_spectrum(t1, t1, 80)


class TestDiameter:
    def test_square_torus(self):
        d = flat_diameter(CrystalGroup.torus(Lattice.standard(2)))
        assert d.value == pytest.approx(math.sqrt(2) / 2)
        assert d.diam_sq == Fraction(1, 2)
        assert not d.upper_bound_only

    def test_squeezed_torus(self):
        t = Fraction(1, 10)
        lat = Lattice(rm.mat([[1 / t, 0], [0, t]]))
        d = flat_diameter(CrystalGroup.torus(lat))
        assert d.value == pytest.approx(0.5 * math.sqrt(100 + 0.01))

    def test_klein_upper_bound_flag(self, klein):
        d = flat_diameter(klein)
        assert d.upper_bound_only
        assert d.value == pytest.approx(math.sqrt(2) / 2)


class TestCheng:
    def test_square_torus_first_eigenvalue(self):
        group = CrystalGroup.torus(Lattice.standard(2))
        spec = bieberbach_spectrum(group, 3000)
        report = cheng_bound_check(spec, 2, flat_diameter(group), 1)
        row = report.rows[0]
        assert row.eigenvalue == pytest.approx(4 * PI2)
        assert row.bound == pytest.approx(48.0)
        assert row.status == "ok"

    def test_collapsed_bound_tracks_eigenvalue(self):
        # squeeze: lambda_1 = 4 pi^2 t^2 while the bound decays like ~96 t^2
        for tq in (Fraction(1, 5), Fraction(1, 10)):
            lat = Lattice(rm.mat([[1 / tq, 0], [0, tq]]))
            group = CrystalGroup.torus(lat)
            spec = torus_spectrum(lat, 4000)
            report = cheng_bound_check(spec, 2, flat_diameter(group), 1)
            assert report.rows[0].eigenvalue == pytest.approx(
                4 * PI2 * float(tq) ** 2)
            assert report.rows[0].status == "ok"

    def test_quotient_inconclusive_never_violated(self, klein):
        spec = bieberbach_spectrum(klein, 6000)
        # an oversized upper-bound diameter shrinks the bound below the
        # eigenvalues, but quotients must report inconclusive, not violated
        fake = DiameterBound(20.0, Fraction(400), True, 0.0)
        report = cheng_bound_check(spec, 2, fake, 6)
        assert report.violations == 0
        assert report.inconclusive > 0
        exact = DiameterBound(20.0, Fraction(400), False, 0.0)
        report2 = cheng_bound_check(spec, 2, exact, 6)
        assert report2.violations > 0

    def test_incomplete_input(self):
        spec = torus_spectrum(Lattice.standard(2), 50)
        with pytest.raises(IncompleteInput):
            cheng_bound_check(spec, 2, DiameterBound(0.7, None, False, 1e-6), 10)

    def test_j_starts_at_one(self):
        spec = torus_spectrum(Lattice.standard(2), 3000)
        group = CrystalGroup.torus(Lattice.standard(2))
        report = cheng_bound_check(spec, 2, flat_diameter(group), 10)
        assert report.rows[0].j == 1
        assert len(report.rows) == 10


class TestSerialization:
    def test_json_round_trip_fields(self):
        s = torus_spectrum(Lattice.standard(2), 100)
        obj = s.to_json()
        assert obj["complete_below_cutoff"] is True
        assert obj["entries"][1]["eigenvalue_exact"] == "4*pi^2"
        assert obj["entries"][1]["multiplicity"] == 4
        rows = s.to_csv_rows()
        assert rows[0] == ["eigenvalue", "eigenvalue_exact", "multiplicity"]
        assert rows[2][1] == "4*pi^2"
