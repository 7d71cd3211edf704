"""Local systems on the sphere and threefold duality tables.

The standard 24-puncture unipotent system of an elliptic surface has exactly
twenty middle classes, matching the rank of the quotient of the fibre-class
perp inside the rank-22 lattice.  Threefold tables carry torsion relations
that the checker verifies pairwise.
"""

from syzlab import (
    LocalSystemOnSphere,
    duality_checks,
    e2_assemble,
    euler_characteristic,
    k3_lattice,
    pushforward_cohomology,
    sublattice_quotient,
)
from syzlab.sheaf import dual_table

A = [[1, 1], [0, 1]]
B = [[1, 0], [-1, 1]]
mats = []
for _ in range(12):
    mats += [A, B]
system = LocalSystemOnSphere(2, mats)

print("== twenty-four unipotent punctures ==")
push = pushforward_cohomology(system)
print("   cohomology ranks:", push.ranks)
print("   euler characteristic:", euler_characteristic(system))
table = e2_assemble("S2", system)
print("   degenerate table middle entry:", table.entry(1, 1))

quotient, _ = sublattice_quotient(k3_lattice(), tuple([1] + [0] * 21))
print("   lattice quotient rank (independent):", quotient.rank)

print("\n== threefold torsion relations ==")
inputs = {"h11": 3, "h12": 5,
          "torsion": {"T11": [2], "T32": [2], "T21": [3], "T22": [3]}}
t = e2_assemble("abstract-n3", inputs)
d = dual_table(t)
for name, ok in duality_checks(t, d).items():
    print(f"   {name:<22} {'ok' if ok else 'FAIL'}")
