import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from flatbif import ratmat as rm
from flatbif.crystal import AffineMap, CollapseFamily, CrystalGroup
from flatbif.lattices import Lattice
from flatbif.spectra import sphere_closed_factor
from flatbif.bifurcation import Scenario

SCENARIO_DIR = Path(__file__).parent.parent / "scenarios"


def affine(linear, translation):
    return AffineMap(rm.mat(linear), rm.vec(translation))


def make_klein(lattice_diag=("1", "1"), shift="1/2"):
    lat = Lattice(rm.mat([[lattice_diag[0], "0"], ["0", lattice_diag[1]]]))
    return CrystalGroup(lat, (affine([["1", "0"], ["0", "-1"]], [shift, "0"]),))


def make_hw3d():
    return CrystalGroup(Lattice.standard(3), (
        affine([["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "-1"]],
               ["1/2", "1/2", "0"]),
        affine([["-1", "0", "0"], ["0", "1", "0"], ["0", "0", "-1"]],
               ["0", "1/2", "1/2"]),
        affine([["-1", "0", "0"], ["0", "-1", "0"], ["0", "0", "1"]],
               ["1/2", "0", "1/2"]),
    ))


@pytest.fixture(scope="session")
def klein():
    return make_klein()


@pytest.fixture(scope="session")
def hw3d():
    return make_hw3d()


def torsion_corpus():
    """(name, group, expected_torsion_free) for d <= 3."""
    z2 = Lattice.standard(2)
    z3 = Lattice.standard(3)
    corpus = [
        ("torus1", CrystalGroup.torus(Lattice.standard(1)), True),
        ("torus2", CrystalGroup.torus(z2), True),
        ("torus3", CrystalGroup.torus(z3), True),
        ("klein", make_klein(), True),
        ("klein_rect", make_klein(lattice_diag=("2", "1"), shift="1"), True),
        ("pg_vertical", CrystalGroup(z2, (
            affine([["-1", "0"], ["0", "1"]], ["0", "1/2"]),)), True),
        ("point_inversion", CrystalGroup(z2, (
            affine([["-1", "0"], ["0", "-1"]], ["0", "0"]),)), False),
        ("inversion_shifted", CrystalGroup(z2, (
            affine([["-1", "0"], ["0", "-1"]], ["1/2", "1/2"]),)), False),
        ("reflection_no_shift", CrystalGroup(z2, (
            affine([["1", "0"], ["0", "-1"]], ["0", "0"]),)), False),
        ("hw3d", make_hw3d(), True),
        ("hw3d_no_shifts", CrystalGroup(z3, (
            affine([["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "-1"]],
                   ["0", "0", "0"]),
            affine([["-1", "0", "0"], ["0", "1", "0"], ["0", "0", "-1"]],
                   ["0", "0", "0"]),
            affine([["-1", "0", "0"], ["0", "-1", "0"], ["0", "0", "1"]],
                   ["0", "0", "0"]),
        )), False),
        ("screw3d", CrystalGroup(z3, (
            affine([["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "-1"]],
                   ["1/2", "0", "0"]),)), True),
        ("kleinx_line", CrystalGroup(z3, (
            affine([["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "1"]],
                   ["1/2", "0", "0"]),)), True),
    ]
    return corpus


@pytest.fixture(scope="session")
def flagship():
    """Unit-volume round 2-sphere times the unit square torus, squeezing
    the first coordinate axis."""
    group = CrystalGroup.torus(Lattice.standard(2))
    family = CollapseFamily.auto(group)
    closed = sphere_closed_factor(2, cutoff="8/3*pi", unit_volume=True)
    return Scenario(closed, group, family)


ALPHA_SQ = Fraction(2, 3)  # t_*^2 = (2/3) / pi for the flagship scenario
