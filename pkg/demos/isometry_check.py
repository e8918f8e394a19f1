"""Decide isometric equivalence of two germs and cross-check with their loci."""
import numpy as np

from corank1 import isometry as iso

rng = np.random.default_rng(2026)
a = iso.random_case_a_germ(rng)
b = iso.random_equivalent(a, rng)
c = iso.random_case_a_germ(rng)

for name, other in (("rotated copy", b), ("independent germ", c)):
    v = iso.check_jet_isometry_equivalence(a, other)
    maps = iso.locus_isometries(a, other)
    print(f"{name}: equivalent={v.equivalent} method={v.method} certificate={v.certificate}")
    print(f"  locus isometries found: {len(maps)}")
    if v.witness is not None:
        print(f"  witness item {v.witness.index}, residual {v.witness.residual:.2e}")

print("\nprinted list audit")
for item in iso.audit_printed_list():
    if not item.consistent:
        print(f"  item {item.index}: {'; '.join(item.issues)}")
print("  missing sign choices (d, h, l, a44):", iso.missing_sign_choices())
