"""Image of the root reflections of h^perp in the finite orthogonal group of D_N.

For each class the roots are reduced modulo 2 in a unimodular extension,
carried to D_N, and turned into transvections; the order of the group
they generate is a lower bound for the image of O(M, h).

Run: python3 demos/04_reflection_images.py [max_d]   (default 5)
"""

import sys

from enriques_lattices.discform import O_PLUS_10_2
from enriques_lattices.genus import enumerate_genus
from enriques_lattices.moduli import gamma_image_lower

max_d = int(sys.argv[1]) if len(sys.argv) > 1 else 5
for d in range(1, max_d + 1):
    for i, c in enumerate(enumerate_genus(d).classes):
        g = gamma_image_lower(c.representative)
        order = g.order
        print(f"d={d} class {i}: {c.root_halfcount:3d} root pairs, "
              f"{len(g.generators):3d} transvections, order {order}, index {O_PLUS_10_2 // order}")
