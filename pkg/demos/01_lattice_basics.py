#!/usr/bin/env python3
"""Lattice primitives: duals, short vectors, covering radii, chains.

Everything below runs in exact rational arithmetic; the only float in
sight is the covering radius, which carries an explicit tolerance.
"""

from fractions import Fraction

from flatbif import (Lattice, covering_radius, dual, enumerate_short_vectors,
                     nested_chain, same_point_set, sublattices_of_index)
from flatbif import ratmat as rm

print("=" * 70)
print("Duals")
print("=" * 70)

z2 = Lattice.standard(2)
print("Z^2 is self-dual:", same_point_set(dual(z2), z2))

squeezed = Lattice(rm.mat([["2", "0"], ["0", "1/2"]]))
print("dual of diag(2, 1/2) Z^2 has basis:")
for row in dual(squeezed).basis:
    print("   ", [str(x) for x in row])
print("covolume * dual covolume =",
      squeezed.covolume() * dual(squeezed).covolume())

print()
print("=" * 70)
print("Certified short vectors")
print("=" * 70)

svs = enumerate_short_vectors(z2, 2)
print(f"nonzero vectors of Z^2 with |x|^2 <= 2 ({len(svs)} of them):")
print("   ", svs.coordinates())

svs = enumerate_short_vectors(squeezed, 1)
print("squeezed lattice, |x|^2 <= 1: coordinates and exact norms:")
for coords, nsq in svs.vectors:
    print(f"    {coords}  |x|^2 = {nsq}")

print()
print("=" * 70)
print("Covering radius (= diameter of the flat torus)")
print("=" * 70)

print("Z^1:", covering_radius(Lattice.standard(1), 1e-9))
print("Z^2:", covering_radius(z2, 1e-9), "(the half diagonal sqrt(2)/2)")
t = Fraction(1, 10)
long_thin = Lattice(rm.mat([[1 / t, 0], [0, t]]))
print(f"diag(10, 1/10) Z^2: {covering_radius(long_thin, 1e-9):.6f}",
      "-> squeezing a direction blows the diameter up")

print()
print("=" * 70)
print("Sublattices and nested chains")
print("=" * 70)

for k in (2, 3, 4):
    subs = sublattices_of_index(z2, k)
    print(f"index {k}: {len(subs)} sublattices "
          f"(sum of divisors of {k})")

chain = nested_chain(z2, [2, 3, 2])
print("chain Z^2 > G1 > G2 > G3 with degrees [2, 3, 2]:")
print("   covolumes:", [str(lat.covolume()) for lat in chain])
