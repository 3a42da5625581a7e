"""Exact graded-piece length counting for term modules.

The primitive is ``count_ideal_degree``: the number of degree-t monomials in
a monomial ideal, computed by a variable-splitting recursion.  Monomials
divisible by the split variable x_s are counted through the colon ideal
(I : x_s) at degree t-1; monomials with zero x_s-exponent are counted in the
restriction of I to the remaining variables.  Both branches shrink (degree or
variable count), so the recursion terminates, and memoization over canonical
generator sets makes repeated ladders cheap.  Inclusion-exclusion over
generator lcm's is kept as an independent cross-check for small inputs.

All counts are plain Python integers, so they never overflow; lengths grow
polynomially in n and would not fit fixed-width types.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Optional

from .backend import minimalize_exponents
from .core import (
    InputError,
    PowerCache,
    TermModule,
    quotient_monomials,
    saturate,
)

_MEMO: dict = {}
_MEMO_LOCK = threading.Lock()


def _canonical_gens(gens) -> tuple:
    return tuple(map(tuple, minimalize_exponents(gens)))


def _colon_variable(gens: tuple, s: int) -> tuple:
    return _canonical_gens(
        g[:s] + (g[s] - 1,) + g[s + 1 :] if g[s] > 0 else g for g in gens
    )


def _restrict_variable(gens: tuple, s: int) -> tuple:
    return _canonical_gens(g[:s] + g[s + 1 :] for g in gens if g[s] == 0)


def _split_variable(gens: tuple) -> int:
    d = len(gens[0])
    maxima = [max(g[s] for g in gens) for s in range(d)]
    return maxima.index(max(maxima))


def _base_count(gens: tuple, t: int) -> Optional[int]:
    if t < 0:
        return 0
    if not gens:
        return 0
    d = len(gens[0])
    first = gens[0]
    if sum(first) == 0:
        # unit ideal: all monomials of degree t
        return comb(t + d - 1, d - 1)
    if t < sum(first):
        # canonical order puts a minimal-degree generator first
        return 0
    if d == 1:
        return 1 if t >= first[0] else 0
    return None


def count_ideal_degree(gens, t: int) -> int:
    """Number of monomials of degree t in the ideal generated by ``gens``."""
    root = (_canonical_gens(gens), int(t))
    cached = _MEMO.get(root)
    if cached is not None:
        return cached
    stack = [root]
    while stack:
        key = stack[-1]
        if key in _MEMO:
            stack.pop()
            continue
        kgens, kt = key
        base = _base_count(kgens, kt)
        if base is not None:
            with _MEMO_LOCK:
                _MEMO[key] = base
            stack.pop()
            continue
        s = _split_variable(kgens)
        left = (_colon_variable(kgens, s), kt - 1)
        right = (_restrict_variable(kgens, s), kt)
        lv = _MEMO.get(left)
        rv = _MEMO.get(right)
        if lv is not None and rv is not None:
            with _MEMO_LOCK:
                _MEMO[key] = lv + rv
            stack.pop()
        else:
            if rv is None:
                stack.append(right)
            if lv is None:
                stack.append(left)
    return _MEMO[root]


def count_ideal_degree_ie(gens, t: int) -> int:
    """Inclusion-exclusion cross-check; exponential, limited to 12 generators."""
    gens = _canonical_gens(gens)
    if len(gens) > 12:
        raise InputError("inclusion-exclusion cross-check limited to 12 generators")
    if t < 0 or not gens:
        return 0
    d = len(gens[0])
    total = 0
    for r in range(1, len(gens) + 1):
        sign = 1 if r % 2 == 1 else -1
        for subset in combinations(gens, r):
            lcm_deg = sum(max(col) for col in zip(*subset))
            if t >= lcm_deg:
                total += sign * comb(t - lcm_deg + d - 1, d - 1)
    return total


def length_component(m: TermModule, degree: int) -> int:
    """k-dimension of the graded piece M_degree (a monomial count)."""
    total = 0
    for basis, gens in m.components:
        t = degree - m.ambient.basis_degree(basis)
        if t >= 0:
            total += count_ideal_degree(gens, t)
    return total


def module_min_degree(m: TermModule) -> Optional[int]:
    """Least degree in which M is nonzero (None for the zero module)."""
    return m.min_degree


def cumulative_length(m: TermModule, degree: int) -> int:
    """Sum of length_component over all degrees <= ``degree``.

    This equals the graded-piece length at ``degree`` of the extension of M
    along a polynomial extension by one extra degree-one variable, without
    materializing that extension.
    """
    lo = module_min_degree(m)
    if lo is None or degree < lo:
        return 0
    return sum(length_component(m, j) for j in range(lo, degree + 1))


@dataclass
class LengthTable:
    """Degree-indexed lengths for one module."""

    module_key: str
    lengths: dict[int, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.lengths.values())

    @property
    def max_degree(self) -> Optional[int]:
        return max(self.lengths) if self.lengths else None


def quotient_total_length(m: TermModule) -> tuple[int, LengthTable]:
    """Exact census of saturate(M)/M: total length and by-degree table."""
    msat = saturate(m)
    terms = quotient_monomials(m, msat)
    table = LengthTable(module_key=m.content_key)
    for t in terms:
        deg = t.degree(m.ambient)
        table.lengths[deg] = table.lengths.get(deg, 0) + 1
    return len(terms), table


class LengthLadder:
    """Shared exact length data for the powers of one module.

    Wraps a power cache and memoizes per-(n, degree) lengths, saturations,
    cumulative sums, and saturation-quotient censuses, so the density,
    multiplicity, and dependence layers all draw on the same computations.
    Insertions are idempotent; recomputation is harmless.
    """

    def __init__(self, module: TermModule, cache: Optional[PowerCache] = None):
        self.module = module
        self.cache = cache if cache is not None else PowerCache()
        self._sat: dict[int, TermModule] = {}
        self._len: dict[tuple[int, int], int] = {}
        self._sat_len: dict[tuple[int, int], int] = {}
        self._census: dict[int, tuple[int, LengthTable]] = {}
        self._lock = threading.Lock()

    def power(self, n: int) -> TermModule:
        return self.cache.power(self.module, n)

    def sat_power(self, n: int) -> TermModule:
        with self._lock:
            cached = self._sat.get(n)
        if cached is None:
            cached = saturate(self.power(n))
            with self._lock:
                cached = self._sat.setdefault(n, cached)
        return cached

    def length(self, n: int, degree: int) -> int:
        key = (n, degree)
        val = self._len.get(key)
        if val is None:
            val = length_component(self.power(n), degree)
            with self._lock:
                val = self._len.setdefault(key, val)
        return val

    def sat_length(self, n: int, degree: int) -> int:
        key = (n, degree)
        val = self._sat_len.get(key)
        if val is None:
            val = length_component(self.sat_power(n), degree)
            with self._lock:
                val = self._sat_len.setdefault(key, val)
        return val

    def cumulative(self, n: int, degree: int) -> int:
        p = self.power(n)
        lo = module_min_degree(p)
        if lo is None or degree < lo:
            return 0
        return sum(self.length(n, j) for j in range(lo, degree + 1))

    def sat_quotient(self, n: int) -> tuple[int, LengthTable]:
        val = self._census.get(n)
        if val is None:
            p = self.power(n)
            msat = self.sat_power(n)
            terms = quotient_monomials(p, msat)
            table = LengthTable(module_key=p.content_key)
            for t in terms:
                deg = t.degree(p.ambient)
                table.lengths[deg] = table.lengths.get(deg, 0) + 1
            val = (len(terms), table)
            with self._lock:
                val = self._census.setdefault(n, val)
        return val

    def sat_quotient_total(self, n: int) -> int:
        return self.sat_quotient(n)[0]
