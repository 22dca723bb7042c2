"""Run a geometric ladder of levels and watch the tree code settle."""

import sys

from curvetree import asymptotic_tree, epsilon_ladder, parse_polynomial

text = sys.argv[1] if len(sys.argv) > 1 else "x^16 + (y^2 + x)^2 (y^2 - x)^2"
f = parse_polynomial(text)
ladder = epsilon_ladder(1e-3, 0.5, 8)
res = asymptotic_tree(f, ladder)

print(text)
for eps, code in zip(ladder.values, res.codes):
    print(f"  {eps:.3e}  {code or '(no tree: level not inside the neighbourhood)'}")
print("stable from step", res.stable_from)
print("asymptotic code", res.asymptotic_code)
print("geodesics monotone:", res.monotone_geodesics)
