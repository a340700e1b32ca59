"""The 2-elementary forms of M and N and the finite orthogonal group they carry.

Run: python3 demos/01_discriminant_forms.py
"""

from enriques_lattices.discform import (
    count_isotropy,
    d_n_space,
    discriminant_form,
    group_order,
    same_disc_form,
    signature_mod8,
    transvection_group,
)
from enriques_lattices.lattice import make_named

m, n = make_named("M"), make_named("N")
for lat in (m, n):
    form = discriminant_form(lat)
    print(f"{lat.name}: rank {lat.rank}, signature {lat.signature}, det {lat.det}, "
          f"D = (Z/2)^{form.rank}, signature mod 8 = {signature_mod8(form)}")

dm, dn = discriminant_form(m), discriminant_form(n)
print("D_M and D_N isomorphic:", same_disc_form(dm, dn))

iso, noniso = count_isotropy(dn)
print(f"D_N: {iso} nonzero isotropic and {noniso} nonisotropic elements")

space = d_n_space()
print("Arf invariant:", space.arf())
group = transvection_group(space)
order = group_order(group)
print(f"group generated by the {len(group.generators)} transvections has order {order}")
print("factored:", "2^21 * 3^5 * 5^2 * 7 * 17 * 31 =", 2**21 * 3**5 * 5**2 * 7 * 17 * 31)
