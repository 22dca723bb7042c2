"""Draw level curve, polar branches and tree for the example suite."""

from pathlib import Path

from curvetree import analyze_level, parse_polynomial
from curvetree.io import render_svg

CASES = {
    "circle": ("x^2 + y^2", 0.04),
    "crescent": ("x^2 + (y^2 - x)^2", 0.01),
    "bone": ("x^16 + (y^2 + x)^2 (y^2 - x)^2", 1e-4),
    "odd": ("(x - y^3)^2 + y^8", 1e-3),
}

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)
for name, (text, eps) in CASES.items():
    a = analyze_level(parse_polynomial(text), eps, shape=False)
    path = render_svg(a.curve, a.branches, a.rooted, out / f"{name}.svg")
    print(f"{name:9s} {a.code:45s} -> {path}")
