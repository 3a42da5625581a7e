"""Density functions of graded term modules.

For a level-1 module M with d ring variables and ambient rank e, the sampled
quantities at scale n and abscissa x are

    adic       (d+e-1)! * len((M^n)_{floor(xn)}) / n^{d+e-2}
    saturated  same with the saturation of M^n
    epsilon    their difference

together with chamber detection from generator degrees and exact piecewise
polynomial fits.  Fitted values come from stabilized finite differences along
rays n = n0 + jH (an exact extrapolation of the sampled sequence, confirmed
on a held-out n), so fitted polynomials have exact rational coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Optional

from .core import InputError, PowerCache, TermModule
from .counting import LengthLadder
from .polyfit import (
    Poly,
    poly_degree,
    poly_eval,
    poly_interpolate,
    stabilized_difference,
)

DEFAULT_LADDER: tuple[int, ...] = (8, 16, 24, 32, 40)
DEFAULT_STEP = Fraction(1, 8)


class FitNotConvergedError(RuntimeError):
    """A fit or limit extraction could not be validated at the given ladder."""


def floor_times(x: Fraction, n: int) -> int:
    """Exact floor(x*n)."""
    return (x.numerator * n) // x.denominator


def require_samplable(m: TermModule) -> None:
    if m.level != 1:
        raise InputError("density functions are defined for level-1 modules")
    if m.is_zero:
        raise InputError("density functions need a nonzero module")
    if m.rank != m.ambient.rank:
        raise InputError(
            f"module rank {m.rank} != ambient rank {m.ambient.rank}; "
            "the engine requires equal ranks"
        )


def default_grid(m: TermModule, step: Fraction = DEFAULT_STEP) -> tuple[Fraction, ...]:
    """Arithmetic x grid on [-c0 - 1, d_M + 2]."""
    require_samplable(m)
    lo = Fraction(-m.ambient.c0 - 1)
    hi = Fraction(m.max_degree + 2)
    step = Fraction(step)
    if step <= 0:
        raise InputError("grid step must be positive")
    out = []
    x = lo
    while x <= hi:
        out.append(x)
        x += step
    return tuple(out)


@dataclass
class DensityGrid:
    """Exact density samples on an x grid over an n ladder."""

    kind: str
    module: TermModule
    xs: tuple[Fraction, ...]
    ladder: tuple[int, ...]
    samples: dict[int, tuple[Fraction, ...]]
    extrapolated: tuple[Fraction, ...]
    diagnostics: tuple[Optional[Fraction], ...]
    support: tuple[Optional[Fraction], Optional[Fraction]]
    meta: dict = field(default_factory=dict)

    @property
    def module_key(self) -> str:
        return self.module.content_key

    def value_at(self, x: Fraction) -> Fraction:
        return self.extrapolated[self.xs.index(Fraction(x))]


def _reference_entry(ladder: tuple[int, ...]) -> Optional[int]:
    """Ladder entry used for the n_max/2 diagnostic: largest entry <= n_max/2."""
    n_max = ladder[-1]
    below = [n for n in ladder if n <= n_max // 2]
    if below:
        return below[-1]
    return ladder[0] if len(ladder) > 1 else None


def _normalize_ladder(ladder) -> tuple[int, ...]:
    ladder = tuple(sorted(set(int(n) for n in ladder)))
    if not ladder or ladder[0] < 1:
        raise InputError("ladder must be positive integers")
    return ladder


def _sample_kind(
    m: TermModule,
    kind: str,
    grid,
    ladder,
    table: Optional[LengthLadder],
    cache: Optional[PowerCache],
    richardson: bool,
) -> DensityGrid:
    require_samplable(m)
    xs = tuple(Fraction(x) for x in grid) if grid is not None else default_grid(m)
    ladder = _normalize_ladder(ladder) if ladder is not None else DEFAULT_LADDER
    table = table if table is not None else LengthLadder(m, cache)
    d = m.ambient.ring.dim
    e = m.ambient.rank

    def raw(n: int, x: Fraction) -> Fraction:
        deg = floor_times(x, n)
        if kind == "adic":
            count = table.length(n, deg)
        elif kind == "saturated":
            count = table.sat_length(n, deg)
        else:
            count = table.sat_length(n, deg) - table.length(n, deg)
        return Fraction(factorial(d + e - 1) * count, n ** (d + e - 2))

    samples = {n: tuple(raw(n, x) for x in xs) for n in ladder}
    n_max = ladder[-1]
    ref = _reference_entry(ladder)
    extrapolated = []
    diagnostics = []
    for i in range(len(xs)):
        top = samples[n_max][i]
        if ref is None:
            extrapolated.append(top)
            diagnostics.append(None)
            continue
        low = samples[ref][i]
        diagnostics.append(abs(top - low))
        if richardson:
            extrapolated.append(
                Fraction(n_max * top - ref * low, n_max - ref)
            )
        else:
            extrapolated.append(top)

    if kind == "adic":
        support = (Fraction(m.min_degree), None)
    elif kind == "saturated":
        support = (Fraction(-m.ambient.c0), None)
    else:
        support = (Fraction(-m.ambient.c0), Fraction(m.max_degree))
    grid_obj = DensityGrid(
        kind=kind,
        module=m,
        xs=xs,
        ladder=ladder,
        samples=samples,
        extrapolated=tuple(extrapolated),
        diagnostics=tuple(diagnostics),
        support=support,
        meta={"richardson": richardson},
    )
    if kind == "epsilon":
        hi = support[1]
        leak = [abs(v) for x, v in zip(xs, grid_obj.extrapolated) if x > hi]
        grid_obj.meta["support_leak"] = max(leak) if leak else Fraction(0)
    return grid_obj


def sample_adic(
    m: TermModule,
    grid=None,
    ladder=None,
    *,
    table: Optional[LengthLadder] = None,
    cache: Optional[PowerCache] = None,
    richardson: bool = False,
) -> DensityGrid:
    """Sample the adic density function of M."""
    return _sample_kind(m, "adic", grid, ladder, table, cache, richardson)


def sample_saturated(
    m: TermModule,
    grid=None,
    ladder=None,
    *,
    table: Optional[LengthLadder] = None,
    cache: Optional[PowerCache] = None,
    richardson: bool = False,
) -> DensityGrid:
    """Sample the saturated density function of M."""
    return _sample_kind(m, "saturated", grid, ladder, table, cache, richardson)


def sample_epsilon(
    m: TermModule,
    grid=None,
    ladder=None,
    *,
    table: Optional[LengthLadder] = None,
    cache: Optional[PowerCache] = None,
    richardson: bool = False,
) -> DensityGrid:
    """Sample the epsilon density (saturated minus adic)."""
    return _sample_kind(m, "epsilon", grid, ladder, table, cache, richardson)


# -- chambers ----------------------------------------------------------------


@dataclass(frozen=True)
class Chamber:
    """Interval between consecutive breakpoints; None bound means unbounded."""

    lower: Optional[Fraction]
    upper: Optional[Fraction]
    lower_closed: bool
    upper_closed: bool

    def contains(self, x: Fraction) -> bool:
        x = Fraction(x)
        if self.lower is not None:
            if x < self.lower or (x == self.lower and not self.lower_closed):
                return False
        if self.upper is not None:
            if x > self.upper or (x == self.upper and not self.upper_closed):
                return False
        return True

    def __str__(self) -> str:
        lo = "-inf" if self.lower is None else str(self.lower)
        hi = "inf" if self.upper is None else str(self.upper)
        return f"{'[' if self.lower_closed else '('}{lo}, {hi}{']' if self.upper_closed else ')'}"


@dataclass
class ChamberDecomposition:
    """Breakpoints, chamber intervals, and (after fitting) exact polynomials."""

    breakpoints: tuple[int, ...]
    chambers: tuple[Chamber, ...]
    polynomials: Optional[tuple[Poly, ...]] = None
    continuity: Optional[tuple[bool, ...]] = None
    top_degree: Optional[int] = None
    residual_max: Optional[Fraction] = None
    diagnostics: dict = field(default_factory=dict)

    def evaluate(self, x: Fraction) -> Fraction:
        if self.polynomials is None:
            raise InputError("decomposition has no fitted polynomials")
        x = Fraction(x)
        if x < self.breakpoints[0]:
            return Fraction(0)
        for ch, poly in zip(self.chambers[1:], self.polynomials[1:]):
            if ch.contains(x):
                return poly_eval(poly, x)
        # x equals the first breakpoint with l >= 2 chambers: use the first
        # nontrivial chamber polynomial (right-continuous extension)
        return poly_eval(self.polynomials[1], x)


def detect_chambers(m: TermModule) -> ChamberDecomposition:
    """Breakpoints are the distinct generator degrees d_1 < ... < d_l."""
    if m.is_zero:
        raise InputError("chamber detection needs a nonzero module")
    if m.level != 1:
        raise InputError("chamber detection is defined for level-1 modules")
    if not m.is_nonneg_graded:
        raise InputError("chamber detection requires a module graded in degrees >= 0")
    bps = m.generator_degrees
    chambers = [Chamber(None, Fraction(bps[0]), False, False)]
    for lo, hi in zip(bps, bps[1:]):
        chambers.append(Chamber(Fraction(lo), Fraction(hi), False, True))
    chambers.append(Chamber(Fraction(bps[-1]), None, True, False))
    return ChamberDecomposition(breakpoints=bps, chambers=tuple(chambers))


# -- exact limits along rays --------------------------------------------------


def _predict_next(values: list[Fraction], degree: int) -> Fraction:
    """Next value of a sequence that is polynomial of the given degree."""
    from math import comb

    window = values[-(degree + 1) :]
    acc = Fraction(0)
    for i, v in enumerate(reversed(window), start=1):
        sign = 1 if (i + 1) % 2 == 0 else -1
        acc += sign * comb(degree + 1, i) * v
    return acc


def ray_extrapolate(
    table: LengthLadder,
    x: Fraction,
    *,
    h_max: int = 12,
    window: int = 3,
    n_floor: int = 8,
) -> Fraction:
    """Exact limit of the adic density at x via finite differences along a ray.

    Samples len((M^n)_{xn}) at n = n0 + jH with H a multiple of the
    denominator of x (so xn is an integer).  Once the counting function is
    polynomial along the ray, the (r+1)-st differences vanish (r = d+e-2) and
    the limit is (r+1) * (r-th difference) / H^r; smaller detected degree
    means the limit is 0.  Each candidate step H is accepted only when the
    difference table stabilizes and predicts a held-out sample exactly.
    """
    m = table.module
    require_samplable(m)
    x = Fraction(x)
    d = m.ambient.ring.dim
    e = m.ambient.rank
    r = d + e - 2
    q = x.denominator
    needed = r + window + 2
    for h in range(1, h_max + 1):
        step = q * h
        n0 = step * max(2, -(-n_floor // step))
        ns = [n0 + j * step for j in range(needed + 1)]
        vals = [Fraction(table.length(n, floor_times(x, n))) for n in ns]
        det = stabilized_difference(vals[:-1], r, window)
        if det is None:
            continue
        degree, lead, _ = det
        if _predict_next(vals[:-1], degree) != vals[-1]:
            continue
        if degree < r:
            return Fraction(0)
        return Fraction((r + 1) * lead, step**r)
    raise FitNotConvergedError(
        f"not converged; increase n ladder (no stable ray at x = {x} with h <= {h_max})"
    )


def _chamber_nodes(ch: Chamber, count: int) -> list[Fraction]:
    """Low-denominator sample points inside a chamber, cheapest first."""
    nodes: list[Fraction] = []
    if ch.upper is None:
        lo = ch.lower
        k = 0 if ch.lower_closed else 1
        while len(nodes) < count:
            nodes.append(lo + Fraction(k, 2))
            k += 1
        return nodes
    seen = set()
    q = 1
    while len(nodes) < count:
        lo_p = floor_times(ch.lower, q) + 1
        hi_p = floor_times(ch.upper, q)
        if not ch.upper_closed and Fraction(hi_p, q) == ch.upper:
            hi_p -= 1
        for p in range(lo_p, hi_p + 1):
            val = Fraction(p, q)
            if val not in seen:
                seen.add(val)
                nodes.append(val)
                if len(nodes) == count:
                    break
        q += 1
        if q > 64:
            raise FitNotConvergedError("chamber too narrow to place fit nodes")
    return nodes


def fit_piecewise(
    grid: DensityGrid,
    chambers: Optional[ChamberDecomposition] = None,
    *,
    table: Optional[LengthLadder] = None,
    tol: Fraction = Fraction(1, 10),
    h_max: int = 12,
    window: int = 3,
    held_out: int = 2,
) -> ChamberDecomposition:
    """Fit exact chamber polynomials of degree <= d-1 to the adic density.

    Each nontrivial chamber polynomial is interpolated through d points whose
    values are exact ray extrapolations (stabilized finite differences,
    confirmed on held-out n), then validated exactly on further interior
    points and within tolerance against every extrapolated grid value in the
    chamber.  Refuses with a diagnostic instead of returning a doubtful fit.
    """
    if grid.kind != "adic":
        raise InputError("piecewise chamber fits are defined for adic grids")
    m = grid.module
    if chambers is None:
        chambers = detect_chambers(m)
    if table is None:
        table = LengthLadder(m)
    d = m.ambient.ring.dim
    polys: list[Poly] = []
    for idx, ch in enumerate(chambers.chambers):
        if idx == 0:
            polys.append(())
            continue
        nodes = _chamber_nodes(ch, d + held_out)
        values = [
            ray_extrapolate(table, x, h_max=h_max, window=window) for x in nodes
        ]
        poly = poly_interpolate(list(zip(nodes[:d], values[:d])))
        for x, v in zip(nodes[d:], values[d:]):
            if poly_eval(poly, x) != v:
                raise FitNotConvergedError(
                    f"not converged; increase n ladder (held-out x = {x} "
                    f"disagrees with the chamber fit)"
                )
        polys.append(poly)

    # validate against the sampled grid
    residual_max = Fraction(0)
    d1 = chambers.breakpoints[0]
    for x, v in zip(grid.xs, grid.extrapolated):
        if x < d1:
            residual = abs(v)
            expected = Fraction(0)
        else:
            matched = None
            for ch, poly in zip(chambers.chambers[1:], polys[1:]):
                if ch.contains(x):
                    matched = poly
                    break
            if matched is None:
                continue  # x equals d_1 with several breakpoints: no chamber
            expected = poly_eval(matched, x)
            residual = abs(v - expected)
        if residual > tol * (1 + abs(expected)):
            raise FitNotConvergedError(
                f"not converged; increase n ladder (grid value at x = {x} "
                f"off the fit by {residual})"
            )
        residual_max = max(residual_max, residual)

    bps = chambers.breakpoints
    continuity = tuple(
        poly_eval(polys[j], Fraction(bps[j])) == poly_eval(polys[j + 1], Fraction(bps[j]))
        for j in range(1, len(bps))
    )
    return ChamberDecomposition(
        breakpoints=bps,
        chambers=chambers.chambers,
        polynomials=tuple(polys),
        continuity=continuity,
        top_degree=poly_degree(polys[-1]),
        residual_max=residual_max,
        diagnostics={
            "tol": tol,
            "ladder": grid.ladder,
            "top_degree_expected": d - 1,
        },
    )


# -- cumulative identity -------------------------------------------------------


def trapezoid(xs: list[Fraction], vs: list[Fraction]) -> Fraction:
    acc = Fraction(0)
    for (x0, v0), (x1, v1) in zip(zip(xs, vs), zip(xs[1:], vs[1:])):
        acc += (v0 + v1) * (x1 - x0) / 2
    return acc


def cumulative_identity(
    m: TermModule,
    x: Fraction,
    *,
    ladder=None,
    grid=None,
    table: Optional[LengthLadder] = None,
    cache: Optional[PowerCache] = None,
    rel_tol: Fraction = Fraction(1, 20),
) -> dict:
    """Compare the cumulative-length limit against the integral of the density.

    The cumulative sampler (d+e)! * cumulative_length(M^n, floor(xn)) /
    n^{d+e-1} converges to (d+e) * integral of the adic density up to x; both
    sides are estimated (Richardson on the ladder; trapezoid on the grid) and
    returned with their gap and a tolerance that scales with the grid spacing
    and 1/n.
    """
    require_samplable(m)
    x = Fraction(x)
    table = table if table is not None else LengthLadder(m, cache)
    ladder = _normalize_ladder(ladder) if ladder is not None else DEFAULT_LADDER
    d = m.ambient.ring.dim
    e = m.ambient.rank

    def lhs_at(n: int) -> Fraction:
        return Fraction(
            factorial(d + e) * table.cumulative(n, floor_times(x, n)),
            n ** (d + e - 1),
        )

    n_max = ladder[-1]
    ref = _reference_entry(ladder)
    top = lhs_at(n_max)
    if ref is not None:
        low = lhs_at(ref)
        lhs = Fraction(n_max * top - ref * low, n_max - ref)
    else:
        lhs = top
    if grid is None:
        step = DEFAULT_STEP
        xs = [Fraction(-m.ambient.c0 - 1)]
        while xs[-1] < x:
            xs.append(xs[-1] + step)
        grid = sample_adic(m, tuple(xs), ladder, table=table, richardson=True)
    cut = [i for i, gx in enumerate(grid.xs) if gx <= x]
    xs_cut = [grid.xs[i] for i in cut]
    vs_cut = [grid.extrapolated[i] for i in cut]
    if not xs_cut or xs_cut[-1] != x:
        raise InputError(f"x = {x} must lie on the density grid")
    integral = trapezoid(xs_cut, vs_cut)
    rhs = (d + e) * integral
    gap = abs(lhs - rhs)
    scale = max(abs(lhs), abs(rhs), Fraction(1))
    # tolerance scales with grid spacing and 1/n: the trapezoid rule puts a
    # spurious step*f/2 cell at the closed lower end of the support, and the
    # two-point Richardson value retains an O(1/n^2) residual estimated from
    # the 1/n coefficient it removed
    step = xs_cut[1] - xs_cut[0] if len(xs_cut) > 1 else Fraction(0)
    peak = max((abs(v) for v in vs_cut), default=Fraction(0))
    quad_term = Fraction((d + e) * step * peak, 2)
    richardson_term = abs(lhs - top) / 2
    tolerance = rel_tol * scale + quad_term + richardson_term
    return {
        "x": x,
        "lhs": lhs,
        "integral": integral,
        "rhs": rhs,
        "gap": gap,
        "relative_gap": gap / scale,
        "quadrature_term": quad_term,
        "richardson_term": richardson_term,
        "tolerance": tolerance,
        "ok": gap <= tolerance,
    }
