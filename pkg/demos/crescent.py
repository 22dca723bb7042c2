"""The Coste crescent x^2 + (y^2 - x)^2: small levels are never convex.

Prints the vertical tangencies, the exact midpoint witness and the tree code
for a few levels.
"""

from curvetree import analyze_level, midpoint_witness, parse_polynomial

f = parse_polynomial("x^2 + (y^2 - x)^2")

for eps in (0.1, 0.01, 1e-4):
    a = analyze_level(f, eps)
    print(f"eps = {eps:g}")
    for t in sorted(a.tangencies, key=lambda t: t.position):
        x, y = t.position
        print(f"  tangency ({x:+.6f}, {y:+.6f})  {t.parity}")
    w = a.convexity.witness
    rep = midpoint_witness(f, eps, w["P"], w["N"])
    print(f"  convex: {a.convexity.is_convex}")
    print(f"  midpoint of P={tuple(round(c, 6) for c in w['P'])} and N={tuple(round(c, 6) for c in w['N'])}")
    print(f"  has f = {float(rep.value):.6g} > eps (margin {float(rep.margin):.3g})")
    print(f"  code {a.code}")
