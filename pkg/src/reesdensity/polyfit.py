"""Exact rational polynomial utilities: interpolation, finite differences,
and bivariate fits by Gaussian elimination over Fraction.

Univariate polynomials are coefficient tuples in ascending order; bivariate
polynomials are {(i, j): coefficient} maps for X^i * Y^j.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

Poly = tuple[Fraction, ...]
Poly2 = dict[tuple[int, int], Fraction]


# -- univariate ------------------------------------------------------------


def poly_trim(coeffs: Sequence[Fraction]) -> Poly:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def poly_degree(p: Sequence[Fraction]) -> int:
    p = poly_trim(p)
    return len(p) - 1 if p else -1


def poly_eval(p: Sequence[Fraction], x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(list(p)):
        acc = acc * x + c
    return acc


def poly_interpolate(points: Sequence[tuple]) -> Poly:
    """Exact Lagrange interpolation through distinct nodes."""
    n = len(points)
    coeffs = [Fraction(0)] * n
    for i, (xi, yi) in enumerate(points):
        # numerator polynomial prod_{j != i} (x - x_j), times y_i / denom
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            denom *= Fraction(xi) - Fraction(xj)
            nxt = [Fraction(0)] * (len(basis) + 1)
            for k, c in enumerate(basis):
                nxt[k] += c * (-Fraction(xj))
                nxt[k + 1] += c
            basis = nxt
        scale = Fraction(yi) / denom
        for k, c in enumerate(basis):
            coeffs[k] += c * scale
    return poly_trim(coeffs)


def poly_to_strings(p: Sequence[Fraction]) -> list[str]:
    return [str(Fraction(c)) for c in p]


# -- finite differences ----------------------------------------------------


def difference_rows(values: Sequence, max_order: int) -> list[list]:
    rows = [list(map(Fraction, values))]
    for _ in range(max_order):
        prev = rows[-1]
        if len(prev) < 2:
            break
        rows.append([b - a for a, b in zip(prev, prev[1:])])
    return rows


def stabilized_difference(
    values: Sequence, max_order: int, window: int = 3
) -> Optional[tuple[int, Fraction, int]]:
    """Detect eventual polynomial behavior of an arithmetic-progression sample.

    Returns (degree, last stabilized difference of that order, onset index)
    for the least degree whose next difference row ends in ``window`` zeros,
    or None when no order up to ``max_order`` stabilizes.  The onset index is
    the first position from which that row stays zero.
    """
    rows = difference_rows(values, max_order + 1)
    for order in range(max_order + 1):
        if order + 1 >= len(rows):
            break
        nxt = rows[order + 1]
        if len(nxt) < window:
            continue
        if any(v != 0 for v in nxt[-window:]):
            continue
        onset = len(nxt)
        while onset > 0 and nxt[onset - 1] == 0:
            onset -= 1
        return order, rows[order][-1], onset
    return None


# -- linear algebra over Fraction -------------------------------------------


def solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination with exact arithmetic; raises on singular systems."""
    n = len(matrix)
    a = [list(map(Fraction, row)) + [Fraction(rhs[i])] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular interpolation system")
        a[col], a[pivot] = a[pivot], a[col]
        inv = a[col][col]
        a[col] = [v / inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [v - factor * w for v, w in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


# -- bivariate -------------------------------------------------------------


def poly2_eval(p: Poly2, x, y) -> Fraction:
    return sum(
        (c * Fraction(x) ** i * Fraction(y) ** j for (i, j), c in p.items()),
        Fraction(0),
    )


def poly2_total_degree(p: Poly2) -> int:
    live = [i + j for (i, j), c in p.items() if c != 0]
    return max(live) if live else -1


def poly2_leading_form(p: Poly2) -> Poly2:
    t = poly2_total_degree(p)
    return {k: c for k, c in p.items() if c != 0 and k[0] + k[1] == t}


def poly2_trim(p: Poly2) -> Poly2:
    return {k: c for k, c in sorted(p.items()) if c != 0}


def poly2_add(p: Poly2, q: Poly2) -> Poly2:
    out = dict(p)
    for k, c in q.items():
        out[k] = out.get(k, Fraction(0)) + c
    return poly2_trim(out)


def poly2_mul(p: Poly2, q: Poly2) -> Poly2:
    out: Poly2 = {}
    for (i1, j1), c1 in p.items():
        for (i2, j2), c2 in q.items():
            k = (i1 + i2, j1 + j2)
            out[k] = out.get(k, Fraction(0)) + c1 * c2
    return poly2_trim(out)


def poly2_scale(p: Poly2, s) -> Poly2:
    s = Fraction(s)
    return poly2_trim({k: c * s for k, c in p.items()})


def poly2_pow(p: Poly2, k: int) -> Poly2:
    out: Poly2 = {(0, 0): Fraction(1)}
    for _ in range(k):
        out = poly2_mul(out, p)
    return out


def poly2_compose_affine(p: Poly2, u: Poly2, v: Poly2) -> Poly2:
    """Substitute X -> u(X,Y), Y -> v(X,Y)."""
    out: Poly2 = {}
    for (i, j), c in p.items():
        term = poly2_scale(poly2_mul(poly2_pow(u, i), poly2_pow(v, j)), c)
        out = poly2_add(out, term)
    return poly2_trim(out)


def fit_poly2_triangular(samples: list[tuple[int, int, int]], total_degree: int) -> Poly2:
    """Interpolate a bivariate polynomial of bounded total degree exactly.

    ``samples`` are (u, v, value) triples; the caller supplies exactly one
    sample per monomial u^i v^j with i + j <= total_degree, laid out on a
    triangular grid with distinct u-abscissae and v-ordinates (unisolvent).
    """
    keys = [
        (i, j)
        for i in range(total_degree + 1)
        for j in range(total_degree + 1 - i)
    ]
    if len(samples) != len(keys):
        raise ValueError(
            f"need {len(keys)} samples for total degree {total_degree}, got {len(samples)}"
        )
    matrix = [
        [Fraction(u) ** i * Fraction(v) ** j for (i, j) in keys]
        for (u, v, _) in samples
    ]
    rhs = [Fraction(val) for (_, _, val) in samples]
    coeffs = solve_exact(matrix, rhs)
    return poly2_trim({k: c for k, c in zip(keys, coeffs)})
