"""Pencil discriminants for the normal-form table and the worked reduction chain."""
from corank1 import nets

for check in nets.audit_table3():
    tag = " (paired with the other sign)" if check.swapped else ""
    print(f"{check.label:5s} {nets.format_cubic(check.determinant):28s} scalar {check.scalar}{tag}")

a = nets.audit_family3(2, 1)
print("\nfamily (3) at c=2, g=1")
print("  determinant:", nets.format_cubic(a.determinant))
print("  printed    :", nets.format_cubic(a.printed))
print("  matches only after reading -λ²ν as -μ²ν:", a.printed_scalar is None and a.corrected_scalar is not None)

r = nets.verify_example44()
print("\nreduction chain verified:", r.chain_verified)
for s in r.chain:
    print("  ", s.description, "->", s.result.format("()"))
print("  original locus:", r.original)
print("  reduced locus :", r.reduced)
