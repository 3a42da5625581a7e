"""Graded term modules over polynomial rings and their Rees powers.

The objects here are submodules of symmetric powers of a shifted free module
F = A(f_1) + ... + A(f_e) over A = k[x_1..x_d], generated by *terms*: a
monomial times a symmetric basis monomial e^a with |a| = n.  Every operation
is exact integer combinatorics on exponent vectors; no Groebner bases and no
field arithmetic anywhere.

Degree conventions: ``shifts[i]`` is the degree of the basis vector e_i (it
may be negative), and the degree of x^alpha * e^a is |alpha| + sum(a_i *
shifts[i]).  At level n the basis exponents a run over the compositions of n
into e parts.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterator, Optional

from .backend import (
    divides_any,
    intersect_exponents,
    minimalize_exponents,
    product_exponents,
)


class InputError(ValueError):
    """Invalid user-supplied data (schema, shapes, preconditions)."""


class RankMismatchError(InputError):
    """Module does not hit every basis component of its ambient free module."""


class NotSubmoduleError(InputError):
    """Pair handed to a containment-sensitive operation is not nested."""


class InternalInvariantError(RuntimeError):
    """Two routes to the same fact disagreed; indicates a bug, not bad input."""


class CensusOverflowError(InternalInvariantError):
    """Quotient monomial census exceeded its node cap; the quotient must be finite."""


@dataclass(frozen=True)
class RingSpec:
    """Polynomial ring k[x_1..x_d] with the standard grading."""

    variables: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(self.variables) < 2:
            raise InputError("ring needs at least two variables")
        if len(set(self.variables)) != len(self.variables):
            raise InputError("ring variables must be distinct")
        if not all(isinstance(v, str) and v for v in self.variables):
            raise InputError("ring variables must be nonempty strings")

    @property
    def dim(self) -> int:
        return len(self.variables)


@dataclass(frozen=True)
class GradedFreeModule:
    """Free module with basis vectors e_i of degree shifts[i]."""

    ring: RingSpec
    shifts: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "shifts", tuple(int(s) for s in self.shifts))
        if not self.shifts:
            raise InputError("free module must have positive rank")

    @property
    def rank(self) -> int:
        return len(self.shifts)

    @property
    def c0(self) -> int:
        """Support offset: degrees of F start at -c0."""
        return max(0, -min(self.shifts))

    def basis_degree(self, basis_exponents: tuple[int, ...]) -> int:
        return sum(a * f for a, f in zip(basis_exponents, self.shifts))


@dataclass(frozen=True)
class Term:
    """x^exponents * e^basis_exponents inside some symmetric power of F."""

    exponents: tuple[int, ...]
    basis_exponents: tuple[int, ...]

    @property
    def level(self) -> int:
        return sum(self.basis_exponents)

    def degree(self, ambient: GradedFreeModule) -> int:
        return sum(self.exponents) + ambient.basis_degree(self.basis_exponents)


Component = tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]


@dataclass(frozen=True)
class TermModule:
    """Term-generated submodule of Sym^level(F), stored componentwise.

    ``components`` pairs each occurring basis exponent with the minimal
    monomial generators of its coefficient ideal.  Construction canonicalizes:
    generators are minimalized per component, empty components are dropped,
    and components are sorted, so equal submodules compare equal.
    """

    ambient: GradedFreeModule
    level: int
    components: tuple[Component, ...]

    def __post_init__(self) -> None:
        d = self.ambient.ring.dim
        e = self.ambient.rank
        if self.level < 0:
            raise InputError("level must be nonnegative")
        canon: list[Component] = []
        seen: dict[tuple[int, ...], set] = {}
        for basis, gens in self.components:
            basis = tuple(int(a) for a in basis)
            if len(basis) != e or any(a < 0 for a in basis):
                raise InputError(f"bad basis exponent {basis!r}")
            if sum(basis) != self.level:
                raise InputError(
                    f"basis exponent {basis!r} has level {sum(basis)}, expected {self.level}"
                )
            bucket = seen.setdefault(basis, set())
            for g in gens:
                g = tuple(int(v) for v in g)
                if len(g) != d or any(v < 0 for v in g):
                    raise InputError(f"bad monomial exponent vector {g!r}")
                bucket.add(g)
        for basis in sorted(seen):
            gens = minimalize_exponents(seen[basis])
            if gens:
                canon.append((basis, tuple(gens)))
        object.__setattr__(self, "components", tuple(canon))

    # -- basic structure -------------------------------------------------

    @cached_property
    def _component_map(self) -> dict[tuple[int, ...], tuple[tuple[int, ...], ...]]:
        return dict(self.components)

    def component(self, basis: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
        return self._component_map.get(tuple(basis), ())

    @property
    def is_zero(self) -> bool:
        return not self.components

    def generators(self) -> Iterator[Term]:
        for basis, gens in self.components:
            for g in gens:
                yield Term(g, basis)

    @property
    def num_generators(self) -> int:
        return sum(len(gens) for _, gens in self.components)

    @cached_property
    def generator_degrees(self) -> tuple[int, ...]:
        """Distinct generator degrees, ascending (d_1 < ... < d_l)."""
        degs = {t.degree(self.ambient) for t in self.generators()}
        return tuple(sorted(degs))

    @property
    def max_degree(self) -> Optional[int]:
        return self.generator_degrees[-1] if self.components else None

    @property
    def min_degree(self) -> Optional[int]:
        return self.generator_degrees[0] if self.components else None

    @property
    def is_nonneg_graded(self) -> bool:
        """Validity flag: all generators live in nonnegative degrees."""
        return self.is_zero or self.min_degree >= 0

    @property
    def rank(self) -> int:
        """Number of distinct basis exponents hit by generators.

        Valid as the rank of the module because generators are terms and
        monomials are invertible over the fraction field.
        """
        return len(self.components)

    @cached_property
    def content_key(self) -> str:
        """Content hash identifying the module up to equality."""
        payload = module_to_payload(self)
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


# -- construction helpers ------------------------------------------------


def term_module(
    ambient: GradedFreeModule, level: int, terms
) -> TermModule:
    """Build a module from (exponents, basis_exponents) pairs or Terms."""
    buckets: dict[tuple[int, ...], list] = {}
    for t in terms:
        if isinstance(t, Term):
            exp, basis = t.exponents, t.basis_exponents
        else:
            exp, basis = t
        buckets.setdefault(tuple(basis), []).append(tuple(exp))
    comps = tuple((b, tuple(g)) for b, g in buckets.items())
    return TermModule(ambient, level, comps)


def ideal_module(ring: RingSpec, exponents, shift: int = 0) -> TermModule:
    """Rank-one convenience: the ideal (gens) inside F = A(shift)."""
    ambient = GradedFreeModule(ring, (shift,))
    return term_module(ambient, 1, [(tuple(e), (1,)) for e in exponents])


def unit_module(ambient: GradedFreeModule) -> TermModule:
    """Sym^0(F) = A, generated by 1."""
    d = ambient.ring.dim
    e = ambient.rank
    return TermModule(ambient, 0, (((0,) * e, ((0,) * d,)),))


def zero_module(ambient: GradedFreeModule, level: int = 1) -> TermModule:
    return TermModule(ambient, level, ())


# -- operations ----------------------------------------------------------


def _require_same_ambient(a: TermModule, b: TermModule) -> None:
    if a.ambient != b.ambient:
        raise InputError("modules live over different ambient free modules")


def product(a: TermModule, b: TermModule) -> TermModule:
    """Image of M_a (x) M_b in Sym^(la+lb)(F): pairwise products of terms."""
    _require_same_ambient(a, b)
    buckets: dict[tuple[int, ...], set] = {}
    for abasis, agens in a.components:
        for bbasis, bgens in b.components:
            cbasis = tuple(x + y for x, y in zip(abasis, bbasis))
            buckets.setdefault(cbasis, set()).update(
                product_exponents(agens, bgens)
            )
    comps = tuple((basis, tuple(gens)) for basis, gens in buckets.items())
    return TermModule(a.ambient, a.level + b.level, comps)


def power(m: TermModule, n: int, cache: "PowerCache | None" = None) -> TermModule:
    """n-th Rees power M^n (image of Sym^n M in Sym^n F)."""
    if n < 0:
        raise InputError("power exponent must be nonnegative")
    if cache is not None:
        return cache.power(m, n)
    if n == 0:
        return unit_module(m.ambient)
    cur = m
    for _ in range(n - 1):
        cur = product(cur, m)
    return cur


def membership(term: Term, m: TermModule) -> bool:
    """A term lies in M iff a generator with the same basis exponent divides it."""
    if term.level != m.level:
        raise InputError(
            f"term has level {term.level}, module has level {m.level}"
        )
    gens = m.component(term.basis_exponents)
    if not gens:
        return False
    return divides_any(term.exponents, gens)


def is_submodule(a: TermModule, b: TermModule) -> bool:
    """True iff A is contained in B (same ambient and level)."""
    _require_same_ambient(a, b)
    if a.level != b.level:
        return False
    return all(membership(t, b) for t in a.generators())


def colon_variable_saturation(m: TermModule, i: int) -> TermModule:
    """(M :_F x_i^inf): zero out the i-th exponent of every generator."""
    d = m.ambient.ring.dim
    if not 0 <= i < d:
        raise InputError(f"variable index {i} out of range")
    comps = []
    for basis, gens in m.components:
        zeroed = {g[:i] + (0,) + g[i + 1 :] for g in gens}
        comps.append((basis, tuple(zeroed)))
    return TermModule(m.ambient, m.level, tuple(comps))


def intersect(a: TermModule, b: TermModule) -> TermModule:
    """Componentwise intersection via pairwise lcm of generators."""
    _require_same_ambient(a, b)
    if a.level != b.level:
        raise InputError("cannot intersect modules of different levels")
    comps = []
    for basis, agens in a.components:
        bgens = b.component(basis)
        if not bgens:
            continue
        comps.append((basis, tuple(intersect_exponents(agens, bgens))))
    return TermModule(a.ambient, a.level, tuple(comps))


def saturate(m: TermModule) -> TermModule:
    """Saturation (M :_F m^inf) = intersection of the per-variable saturations."""
    d = m.ambient.ring.dim
    if m.is_zero:
        return m
    out = colon_variable_saturation(m, 0)
    for i in range(1, d):
        out = intersect(out, colon_variable_saturation(m, i))
    return out


def quotient_monomials(
    m: TermModule,
    msat: TermModule,
    max_nodes: int = 2_000_000,
) -> list[Term]:
    """The finite set of terms lying in ``msat`` but not in ``m``.

    Breadth-first from the generators of ``msat`` outside ``m``, multiplying
    by variables and pruning branches that enter ``m``.  The pruning is
    complete because divisor chains inside ``msat`` that start outside ``m``
    stay outside ``m`` until they enter it for good.  The census is finite
    whenever msat/m has finite length (guaranteed when ``msat`` is the
    saturation of ``m``); the node cap turns a violated finiteness assumption
    into an error rather than a hang.
    """
    _require_same_ambient(m, msat)
    if m.level != msat.level:
        raise InputError("census requires equal levels")
    if not is_submodule(m, msat):
        raise NotSubmoduleError("census requires the first module inside the second")
    d = m.ambient.ring.dim
    seen: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
    frontier: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    for t in msat.generators():
        node = (t.exponents, t.basis_exponents)
        if not membership(t, m) and node not in seen:
            seen.add(node)
            if len(seen) > max_nodes:
                raise CensusOverflowError(
                    f"quotient census exceeded {max_nodes} nodes; "
                    "the quotient should have finite length"
                )
            frontier.append(node)
    while frontier:
        exp, basis = frontier.pop()
        for i in range(d):
            nxt = exp[:i] + (exp[i] + 1,) + exp[i + 1 :]
            node = (nxt, basis)
            if node in seen:
                continue
            if membership(Term(nxt, basis), m):
                continue
            seen.add(node)
            if len(seen) > max_nodes:
                raise CensusOverflowError(
                    f"quotient census exceeded {max_nodes} nodes; "
                    "the quotient should have finite length"
                )
            frontier.append(node)
    terms = [Term(exp, basis) for exp, basis in seen]
    terms.sort(key=lambda t: (t.degree(m.ambient), t.basis_exponents, t.exponents))
    return terms


def _monomials_of_degree(d: int, t: int) -> Iterator[tuple[int, ...]]:
    if t < 0:
        return
    if d == 1:
        yield (t,)
        return
    for first in range(t + 1):
        for rest in _monomials_of_degree(d - 1, t - first):
            yield (first,) + rest


def degree_truncation(m: TermModule, c: int) -> TermModule:
    """Submodule generated by all terms of M of degree exactly c."""
    d = m.ambient.ring.dim
    comps = []
    for basis, gens in m.components:
        base = m.ambient.basis_degree(basis)
        t = c - base
        if t < 0:
            continue
        bucket = set()
        for g in gens:
            rem = t - sum(g)
            if rem < 0:
                continue
            for extra in _monomials_of_degree(d, rem):
                bucket.add(tuple(x + y for x, y in zip(g, extra)))
        if bucket:
            comps.append((basis, tuple(bucket)))
    return TermModule(m.ambient, m.level, tuple(comps))


# -- serialization (internal payload, any level) --------------------------


def module_to_payload(m: TermModule) -> dict:
    return {
        "variables": list(m.ambient.ring.variables),
        "shifts": list(m.ambient.shifts),
        "level": m.level,
        "components": [
            {"basis_exponents": list(basis), "generators": [list(g) for g in gens]}
            for basis, gens in m.components
        ],
    }


def module_from_payload(payload: dict) -> TermModule:
    ring = RingSpec(tuple(payload["variables"]))
    ambient = GradedFreeModule(ring, tuple(payload["shifts"]))
    comps = tuple(
        (tuple(c["basis_exponents"]), tuple(map(tuple, c["generators"])))
        for c in payload["components"]
    )
    return TermModule(ambient, int(payload["level"]), comps)


# -- power cache -----------------------------------------------------------


class PowerCache:
    """Get-or-compute cache of Rees powers, optionally persisted to disk.

    In-memory entries are shared across all consumers of the cache; disk
    persistence (when a directory is given) stores each requested power as a
    content-addressed JSON file, so repeated runs are byte-reproducible and
    warm runs skip the power ladder entirely.  Writes go through a lock;
    recomputing a power twice is harmless because insertion is idempotent.
    """

    def __init__(self, directory: "str | Path | None" = None) -> None:
        self._memory: dict[tuple[str, int], TermModule] = {}
        self._lock = threading.Lock()
        self.directory = Path(directory) if directory is not None else None
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str, n: int) -> "Path | None":
        if self.directory is None:
            return None
        return self.directory / f"{key}.{n}.json"

    def _load(self, key: str, n: int) -> "TermModule | None":
        path = self._path(key, n)
        if path is None or not path.exists():
            return None
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
            mod = module_from_payload(payload)
        except (ValueError, KeyError, OSError):
            return None
        return mod

    def _store(self, key: str, n: int, mod: TermModule) -> None:
        path = self._path(key, n)
        if path is None or path.exists():
            return
        blob = json.dumps(
            module_to_payload(mod), sort_keys=True, separators=(",", ":")
        )
        tmp = path.with_suffix(".tmp")
        tmp.write_text(blob, encoding="utf-8")
        tmp.replace(path)

    def power(self, m: TermModule, n: int) -> TermModule:
        if n < 0:
            raise InputError("power exponent must be nonnegative")
        if n == 0:
            return unit_module(m.ambient)
        if n == 1:
            return m
        key = m.content_key
        with self._lock:
            cached = self._memory.get((key, n))
        if cached is not None:
            return cached
        loaded = self._load(key, n)
        if loaded is not None:
            with self._lock:
                self._memory.setdefault((key, n), loaded)
            return loaded
        # walk down to the largest cached power, then multiply up
        base = n - 1
        cur = None
        with self._lock:
            while base > 1:
                cur = self._memory.get((key, base))
                if cur is not None:
                    break
                base -= 1
        if cur is None:
            base = 1
            cur = m
        for k in range(base + 1, n + 1):
            cur = product(cur, m)
            with self._lock:
                cur = self._memory.setdefault((key, k), cur)
        self._store(key, n, cur)
        return cur
