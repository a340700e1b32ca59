"""Enumerate the genus of <-2d> + E8(-1) and print the verdict table.

Bold entries have fewer than 25 reflection classes, so the weight bound
gives no conclusion for that polarization class.

Run: python3 demos/03_genus_table.py [max_d]   (default 12; 21 takes a few minutes)
"""

import sys
import time

from enriques_lattices.genus import enumerate_genus
from enriques_lattices.moduli import THRESHOLD, classify_enumeration

max_d = int(sys.argv[1]) if len(sys.argv) > 1 else 12
print(f"threshold on reflection classes: {THRESHOLD}")
for d in range(1, max_d + 1):
    t = time.monotonic()
    e = enumerate_genus(d)
    report = classify_enumeration(e)
    print(f"{report.markdown_row():55s} mass {str(e.empirical_mass):>22s}  {time.monotonic() - t:5.1f}s")
