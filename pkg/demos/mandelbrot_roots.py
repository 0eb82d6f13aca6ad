"""Roots of the Mandelbrot-type polynomials M_n and where they sit.

Prints the exact low-degree polynomials, then the numeric roots for a few n
along with their distance from 1/4 and the escape behaviour of -2r.
"""
from multsq import mandelbrot as mb

for n in range(2, 7):
    print(f"M_{n}:", ", ".join(str(c) for c in mb.mandel_poly(n).coeffs))

print("\nleading coefficients:", [str(mb.leading_coeff(n)) for n in range(2, 9)])

for n in (8, 16, 32):
    roots = mb.roots_numeric(n)
    far = max(r.dist_to_quarter for r in roots)
    worst = max(r.residual for r in roots)
    print(f"n={n:>2}: {len(roots)} roots, max |r - 1/4| = {far:.4f}, max residual {worst:.1e}")

rows = mb.root_locus_export(24)
escaping = sum(r["escape_iter"] is not None for r in rows)
print(f"\nlocus n<=24: {len(rows)} roots, {escaping} with -2r escaping")

for c in (2, -3, 1 + 1j):
    print(f"c={c}: R_c ~ {mb.radius_limit(c):.6f}")
