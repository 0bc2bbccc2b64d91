#!/usr/bin/env python3
"""Crystallographic groups: validation, torsion, cones, collapse.

The running example is the Klein bottle group: the unit square lattice
plus a glide (diag(1,-1), (1/2, 0)).
"""

from fractions import Fraction

from flatbif import (CollapseFamily, CrystalGroup, Lattice, collapse_map,
                     cone_membership, conjugate_group,
                     find_invariant_subspace, is_torsion_free, validate_group)
from flatbif import ratmat as rm
from flatbif.crystal import AffineMap

klein = CrystalGroup(
    Lattice.standard(2),
    (AffineMap(rm.mat([["1", "0"], ["0", "-1"]]), rm.vec(["1/2", "0"])),))

print("=" * 70)
print("Validation: closure, lattice preservation, orthogonality")
print("=" * 70)
print("Klein bottle group valid:", validate_group(klein).ok)

bad = CrystalGroup(
    Lattice(rm.mat([["2", "0"], ["0", "1"]])),
    (AffineMap(rm.mat([["1", "0"], ["0", "-1"]]), rm.vec(["1/2", "0"])),))
report = validate_group(bad)
print("same glide over 2Z x Z valid:", report.ok)
print("   first failure:", report.failures[0].detail)

print()
print("=" * 70)
print("Torsion: the exact projection criterion")
print("=" * 70)
print("Klein bottle torsion-free:", is_torsion_free(klein).torsion_free,
      " (the glide squared is the translation (1,0))")

inversion = CrystalGroup(
    Lattice.standard(2),
    (AffineMap(rm.mat([["-1", "0"], ["0", "-1"]]), rm.vec(["1/2", "1/2"])),))
result = is_torsion_free(inversion)
print("shifted point inversion torsion-free:", result.torsion_free)
print("   witness: coset", result.witness.coset_index,
      "fixes", [str(x) for x in result.witness.fixed_point])

print()
print("=" * 70)
print("The deformation cone: which shape changes stay isometric actions")
print("=" * 70)
print("diag(2, 3):", cone_membership(klein, rm.mat([["2", "0"], ["0", "3"]])))
print("shear [[1,1],[0,1]]:",
      cone_membership(klein, rm.mat([["1", "1"], ["0", "1"]])))

print()
print("=" * 70)
print("Collapse: squeeze an invariant subspace at constant volume")
print("=" * 70)
p = find_invariant_subspace(klein)
print("invariant subspace projection (first axis):")
for row in p:
    print("   ", [str(x) for x in row])

family = CollapseFamily.auto(klein)
for t in (Fraction(1, 2), Fraction(1, 4)):
    a_t = collapse_map(family, t)
    print(f"t = {t}: A_t = diag({a_t[0][0]}, {a_t[1][1]}), "
          f"det = {rm.det(a_t)}")

conj = conjugate_group(klein, collapse_map(family, Fraction(1, 2)))
print("conjugated group at t = 1/2 is again a valid Klein bottle group:",
      validate_group(conj).ok)
print("   its lattice basis:",
      [[str(x) for x in row] for row in conj.lattice.basis])
print("   its glide translation:",
      [str(x) for x in conj.holonomy[1].translation])
