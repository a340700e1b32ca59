"""Orthogonal complements of polarizations in U + E8(-1).

h = e + d f always gives <-2d> + E8(-1).  Other primitive vectors of the
same norm can land in different orbits; for degrees 4 and 6 we exhibit
one and certify its complement with an explicit isometry.

Run: python3 demos/02_polarization_orbits.py
"""

from enriques_lattices.defenum import is_isometric, root_halfcount
from enriques_lattices.lattice import divisor, l_ev, l_odd, make_named, parse_lattice
from enriques_lattices.moduli import (
    SECOND_ORBIT,
    SECOND_ORBIT_COMPLEMENT,
    polarization_complement,
    second_orbit_witness,
    trivial_polarization,
)

n = make_named("N")
print("divisor of l_odd in N:", divisor(l_odd(), n))
print("divisor of l_ev in N: ", divisor(l_ev(), n))
print()

for degree in (4, 6):
    d = degree // 2
    comp = polarization_complement(trivial_polarization(d))
    ref = parse_lattice(f"<{-degree}>+E8(-1)")
    print(f"degree {degree}: h = e + {d}f, complement isometric to <{-degree}>+E8(-1):",
          is_isometric(comp, ref) is not None, f"({root_halfcount(comp)} root pairs)")
    h = SECOND_ORBIT[degree]
    w = second_orbit_witness(degree)
    print(f"degree {degree}: h = {h}")
    print(f"  complement isometric to {SECOND_ORBIT_COMPLEMENT[degree]}: {w is not None and w.check()}",
          f"({root_halfcount(polarization_complement(h))} root pairs)")
    print("  witness matrix rows:")
    for row in w.matrix:
        print("   ", row)
