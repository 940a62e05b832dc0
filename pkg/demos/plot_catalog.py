"""
Comparing malware families
==========================

The built-in catalog holds the seven profiles. Each is scored on eight
ordinal axes, 1 meaning least severe; unknown cells score 0.
"""

from p2pvirus.malware import builtin_catalog, compare_catalog, find_profile

catalog = builtin_catalog()
matrix = compare_catalog(catalog)

print("virus".ljust(18), " ".join(c[:6].rjust(6) for c in matrix.columns))
for name, row in zip(matrix.names, matrix.scores):
    print(name.ljust(18), " ".join(str(int(v)).rjust(6) for v in row))

lirva = find_profile(catalog, "Lirva")
print("\nLirva disguises itself as, e.g.:", ", ".join(lirva.disguise_filenames[:3]))
