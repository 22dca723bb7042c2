"""x^6 + (y^2 - x)^2 has small levels that are not even star-shaped.

From about eps = 1e-4 the kernel (points that see the whole curve) is empty.
At every level an exact rational check shows the origin cannot see the tip.
"""

from fractions import Fraction

from curvetree import analyze_level, midpoint_witness, parse_polynomial

f = parse_polynomial("x^6 + (y^2 - x)^2")
for eps in (1e-2, 1e-4, 1e-6):
    a = analyze_level(f, eps)
    tip = (eps ** (1 / 6), eps ** (1 / 12))
    rep = midpoint_witness(f, Fraction(eps), tip, (0, 0))
    print(f"eps={eps:g}  star={a.star.is_star}  kernel vertices={len(a.star.kernel)}  "
          f"f(midpoint) - eps = {float(rep.margin):.3g}")
