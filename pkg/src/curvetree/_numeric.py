"""Small numeric kernels: univariate real roots and 2x2 Newton solves."""

from __future__ import annotations

import math

import numpy as np


def polish_root(coeffs, y: float, iters: int = 30) -> float:
    """Newton-polish a root of the polynomial with ``coeffs`` (highest first)."""
    c = [float(v) for v in coeffs]
    last = math.inf
    for _ in range(iters):
        p, dp = c[0], 0.0
        for a in c[1:]:
            dp = dp * y + p
            p = p * y + a
        if dp == 0.0 or not math.isfinite(p):
            break
        step = p / dp
        if not math.isfinite(step) or abs(step) >= last:
            break  # no longer contracting: rounding level reached
        y -= step
        last = abs(step)
        if last <= 4e-16 * max(1.0, abs(y)):
            break
    return y


def real_roots(coeffs: np.ndarray, imag_tol: float = 1e-6, lo: float = -np.inf, hi: float = np.inf) -> np.ndarray:
    """Sorted distinct real roots of a float polynomial (highest power first)."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    if c.size <= 1:
        return np.zeros(0)
    # strip exact zero roots first, numpy.roots handles them poorly in clusters
    nzero = 0
    while c.size > 1 and c[-1] == 0.0:
        c = c[:-1]
        nzero += 1
    out = []
    if nzero:
        out.append(0.0)
    if c.size > 1:
        scale = np.max(np.abs(c))
        roots = np.roots(c / scale)
        for z in roots:
            if abs(z.imag) <= imag_tol * (1.0 + abs(z.real)):
                y = polish_root(c, float(z.real))
                mags = np.abs(c) * np.abs(y) ** np.arange(c.size - 1, -1, -1)
                if abs(np.polyval(c, y)) <= 1e-8 * float(np.sum(mags)) + 1e-300:
                    out.append(y)
    out = np.sort(np.array(out, dtype=float))
    out = out[(out >= lo) & (out <= hi)]
    if out.size > 1:
        keep = np.concatenate([[True], np.diff(out) > 1e-13 * (1.0 + np.abs(out[1:]))])
        out = out[keep]
    return out


def solve2(a11, a12, a21, a22, b1, b2):
    det = a11 * a22 - a12 * a21
    if det == 0 or not math.isfinite(det):
        return None
    return ((b1 * a22 - a12 * b2) / det, (a11 * b2 - b1 * a21) / det)


def _horner_src(col: dict, var: str) -> str:
    """Source for a Horner evaluation of ``{power: coeff}`` in ``var``."""
    if not col:
        return "0.0"
    n = max(col)
    src = repr(float(col.get(n, 0.0)))
    for k in range(n - 1, -1, -1):
        c = float(col.get(k, 0.0))
        src = f"({src})*{var}" + (f" + {c!r}" if c else "")
    return src


def scalar_source(terms) -> str:
    cols: dict = {}
    for (i, j), c in terms.items():
        cols.setdefault(j, {})[i] = c
    if not cols:
        return "0.0"
    ny = max(cols)
    src = _horner_src(cols.get(ny, {}), "x")
    for j in range(ny - 1, -1, -1):
        src = f"({src})*y + ({_horner_src(cols.get(j, {}), 'x')})"
    return src


def compile_scalar(*polys):
    """A fast scalar evaluator ``(x, y) -> tuple`` of several polynomials."""
    body = ", ".join(scalar_source(p.terms) for p in polys)
    return eval(f"lambda x, y: ({body},)")  # noqa: S307 - source built from float literals only
