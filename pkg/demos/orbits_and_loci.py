"""Walk through the six orbits and two germs whose loci the orbit does not pin down."""
from corank1 import affine_hull_of_locus, classify_orbit, locus_type_exact, parse_germ
from corank1.germcore import jet_of
from corank1.locus import coefficient_rows, default_rational_params, sample_singular_exact, vanishing_forms, NORMAL_NAMES
from corank1.classify import NORMAL_FORM_TEXT

print("orbit normal forms and their locus types")
for label, text in NORMAL_FORM_TEXT.items():
    j = jet_of(parse_germ(text))
    t = locus_type_exact(j)
    print(f"  {label.value:9s} {text:28s} {t.value:18s} dim {t.dimension}")

# Same orbit as the crosscap, but the locus is no longer the paraboloid.
g = parse_germ("(x, y, x*z + y^2, y*z, z^2)")
ps = default_rational_params(10)
pts = sample_singular_exact(g, ps, ps)
print("\n(x, y, xz + y^2, yz, z^2):", classify_orbit(g).value)
print("  degree-2 forms vanishing on the locus:", len(vanishing_forms(pts, 2)))
for f in vanishing_forms(pts, 4)[:3]:
    print("   ", f.format(NORMAL_NAMES))

# A rank-2 orbit whose locus still spans three dimensions.
h = parse_germ("(x, y, x^2 + z^2, x*y + x*z, y^2)")
print("\n(x, y, x^2 + z^2, xy + xz, y^2):", classify_orbit(h).value,
      "hull dimension", affine_hull_of_locus(h).dimension)
