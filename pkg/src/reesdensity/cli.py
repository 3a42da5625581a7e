"""Command-line surface: density, multiplicity, check, corpus.

Exit codes: 0 success, 2 input error, 3 undetermined verdict or fit that did
not converge, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .core import InputError, InternalInvariantError, PowerCache, TermModule
from .counting import LengthLadder
from .density import (
    FitNotConvergedError,
    detect_chambers,
    fit_piecewise,
    sample_adic,
    sample_epsilon,
    sample_saturated,
)
from .dependence import check_dependence
from .io import (
    chambers_payload,
    corpus_description,
    corpus_names,
    dump_json,
    fraction_str,
    grid_payload,
    load_corpus_module,
    load_module_file,
    parse_fraction,
    polynomial_str,
    report_payload,
    verdict_payload,
    write_density_csv,
    write_json,
)
from .multiplicity import (
    diagonal_multiplicity,
    epsilon_multiplicity,
    mixed_multiplicities,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNDETERMINED = 3
EXIT_INVARIANT = 4

_KINDS = ("adic", "saturated", "epsilon")
_SAMPLERS = {
    "adic": sample_adic,
    "saturated": sample_saturated,
    "epsilon": sample_epsilon,
}


@dataclass
class RunConfig:
    """Validated knobs shared by the subcommands."""

    ladder: Optional[tuple[int, ...]] = None
    grid: Optional[tuple[Fraction, ...]] = None
    c: Optional[int] = None
    n_max: int = 12
    tol: Fraction = Fraction(1, 10)
    json_out: Optional[Path] = None
    csv_out: Optional[Path] = None
    cache_dir: Optional[Path] = None

    def __post_init__(self) -> None:
        if self.ladder is not None:
            if any(b <= a for a, b in zip(self.ladder, self.ladder[1:])):
                raise InputError("ladder must be strictly increasing")
            if self.ladder[0] < 1:
                raise InputError("ladder entries must be positive")
        if self.tol <= 0:
            raise InputError("tolerance must be positive")


def _parse_ladder(text: str) -> tuple[int, ...]:
    try:
        entries = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise InputError(f"bad ladder {text!r}: {exc}") from exc
    if not entries:
        raise InputError("ladder must not be empty")
    return entries


def _parse_grid(text: str) -> tuple[Fraction, ...]:
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"bad grid {text!r}; expected LO:HI:STEP")
    lo, hi, step = (parse_fraction(p) for p in parts)
    if step <= 0:
        raise InputError("grid step must be positive")
    if hi < lo:
        raise InputError("grid upper bound must be >= lower bound")
    xs = []
    x = lo
    while x <= hi:
        xs.append(x)
        x += step
    return tuple(xs)


def _scaled_ladder(n_max: int, rungs: int = 5) -> tuple[int, ...]:
    """Rungs evenly spaced up to n_max, mirroring the 8..40 default shape."""
    if n_max < 1:
        raise InputError("--nmax must be positive")
    ladder = sorted({max(1, round(j * n_max / rungs)) for j in range(1, rungs + 1)})
    if ladder[-1] != n_max:
        ladder.append(n_max)
    return tuple(ladder)


def _load_module(spec: str) -> TermModule:
    if spec.startswith("corpus:"):
        return load_corpus_module(spec[len("corpus:") :])
    return load_module_file(spec)


def _make_cache(args) -> Optional[PowerCache]:
    if getattr(args, "no_cache", False):
        return None
    cache_dir = getattr(args, "cache_dir", None)
    return PowerCache(cache_dir) if cache_dir else PowerCache()


def _out_path(base: Optional[str], module_spec: str, kind: str, many: bool, suffix: str) -> Path:
    if base is None:
        stem = Path(module_spec.removeprefix("corpus:")).stem
        return Path(f"{stem}.{kind}{suffix}")
    path = Path(base)
    if many:
        return path.with_suffix(f".{kind}{suffix}")
    return path


# -- density -------------------------------------------------------------------


def _cmd_density(args) -> int:
    module = _load_module(args.module)
    kinds = tuple(k.strip() for k in args.kind.split(",") if k.strip())
    for kind in kinds:
        if kind not in _KINDS:
            raise InputError(f"unknown density kind {kind!r}; choose from {_KINDS}")
    ladder = (
        _parse_ladder(args.ladder)
        if args.ladder
        else (_scaled_ladder(args.nmax) if args.nmax else None)
    )
    grid = _parse_grid(args.grid) if args.grid else None
    config = RunConfig(
        ladder=ladder,
        grid=grid,
        tol=parse_fraction(args.tol) if args.tol else Fraction(1, 10),
        json_out=Path(args.json_out) if args.json_out else None,
        csv_out=Path(args.csv_out) if args.csv_out else None,
        cache_dir=Path(args.cache_dir) if args.cache_dir else None,
    )
    cache = _make_cache(args)
    table = LengthLadder(module, cache)
    many = len(kinds) > 1
    for kind in kinds:
        sampler = _SAMPLERS[kind]
        grid_obj = sampler(
            module, config.grid, config.ladder, table=table, richardson=args.richardson
        )
        csv_path = _out_path(args.csv_out, args.module, kind, many, ".csv")
        write_density_csv(grid_obj, csv_path)
        print(f"{kind}: ladder {list(grid_obj.ladder)}, "
              f"{len(grid_obj.xs)} grid points, csv -> {csv_path}")
        payload = grid_payload(grid_obj)
        if kind == "adic" and args.fit:
            fit = fit_piecewise(grid_obj, detect_chambers(module),
                                table=table, tol=config.tol)
            payload["chambers"] = chambers_payload(fit)
            for ch, poly in zip(fit.chambers, fit.polynomials):
                print(f"  {ch}: {polynomial_str(poly)}")
        if args.json_out:
            json_path = _out_path(args.json_out, args.module, kind, many, ".json")
            write_json(json_path, payload)
            print(f"{kind}: json -> {json_path}")
    return EXIT_OK


# -- multiplicity ----------------------------------------------------------------


def _cmd_multiplicity(args) -> int:
    module = _load_module(args.module)
    wants = [name for name, on in (
        ("epsilon", args.epsilon), ("diagonal", args.diagonal), ("mixed", args.mixed)
    ) if on]
    if not wants:
        wants = ["epsilon"]
    ladder = (
        _parse_ladder(args.ladder)
        if args.ladder
        else (tuple(range(1, args.nmax + 1)) if args.nmax else None)
    )
    cache = _make_cache(args)
    table = LengthLadder(module, cache)
    c = args.c if args.c is not None else module.max_degree + 1
    reports = []
    status_worst = EXIT_OK
    for name in wants:
        if name == "epsilon":
            report = epsilon_multiplicity(
                module, ladder, table=table, cache=cache,
                tol=parse_fraction(args.tol) if args.tol else Fraction(3, 20),
            )
            exact = report.values["exact"]
            print(f"epsilon: status {report.status}, "
                  f"estimate {fraction_str(report.values['estimate'])}"
                  + (f", exact {fraction_str(exact)}" if exact is not None else ""))
        elif name == "diagonal":
            report = diagonal_multiplicity(module, c, ladder=ladder, table=table)
            for version in ("a_version", "s_version"):
                v = report.values[version]
                label = "base ring" if version == "a_version" else "extension"
                if v is None:
                    print(f"diagonal ({label}): undetermined")
                else:
                    print(f"diagonal ({label}): dimension {v['dimension']}, "
                          f"multiplicity {fraction_str(v['multiplicity'])}")
        else:
            report = mixed_multiplicities(
                module, extended=args.extended, c=c, table=table, cache=cache
            )
            if report.values["e"] is None:
                print(f"mixed: {report.status} ({report.diagnostics.get('reason')})")
            else:
                es = ", ".join(fraction_str(v) for v in report.values["e"])
                print(f"mixed: status {report.status}, e = [{es}]")
        reports.append(report)
        if report.status == "undetermined":
            status_worst = EXIT_UNDETERMINED
    if args.json_out:
        payload = {
            "schema_version": 1,
            "reports": [report_payload(r) for r in reports],
        }
        write_json(args.json_out, payload)
        print(f"json -> {args.json_out}")
    return status_worst


# -- check -----------------------------------------------------------------------


def _cmd_check(args) -> int:
    sub = _load_module(args.sub)
    sup = _load_module(args.sup)
    ladder = _parse_ladder(args.ladder) if args.ladder else None
    cache = _make_cache(args)
    verdict = check_dependence(
        sub, sup, c=args.c, n_max=args.nmax, ladder=ladder, cache=cache,
        robustness_c=args.both_c,
    )
    print(f"verdict: {verdict.verdict}")
    if verdict.certificate is not None:
        print(f"certificate: M^{verdict.certificate + 1} = N*M^{verdict.certificate}")
    print(f"{'criterion':<38} {'N':<22} {'M':<22} match")
    for cr in verdict.criteria:
        left = "n/a" if cr.left is None else _short(cr.left)
        right = "n/a" if cr.right is None else _short(cr.right)
        match = "-" if cr.match is None else ("yes" if cr.match else "NO")
        print(f"{cr.label:<38} {left:<22} {right:<22} {match}")
    if args.json_out:
        write_json(args.json_out, verdict_payload(verdict))
        print(f"json -> {args.json_out}")
    return EXIT_OK if verdict.verdict != "undetermined" else EXIT_UNDETERMINED


def _short(value) -> str:
    if isinstance(value, Fraction):
        return fraction_str(value)
    if isinstance(value, tuple):
        return "(" + ", ".join(_short(v) for v in value) + ")"
    return str(value)


# -- corpus ---------------------------------------------------------------------


def _cmd_corpus(args) -> int:
    if args.show:
        module = load_corpus_module(args.show)
        sys.stdout.write(dump_json({"module": module}))
        return EXIT_OK
    names = corpus_names()
    width = max((len(n) for n in names), default=0)
    for name in names:
        print(f"{name:<{width}}  {corpus_description(name)}")
    return EXIT_OK


# -- entry ------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--cache-dir", help="persist power caches in this directory")
    parser.add_argument("--no-cache", action="store_true",
                        help="disable the in-memory power cache")
    parser.add_argument("--json-out", help="write a JSON payload here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reesdensity",
        description="Exact density functions, multiplicities, and integral-"
                    "dependence checks for term-generated graded modules.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_density = sub.add_parser("density", help="sample density functions")
    p_density.add_argument("--module", required=True,
                           help="module document path (or corpus:<name>)")
    p_density.add_argument("--kind", default="adic",
                           help="comma list from adic,saturated,epsilon")
    p_density.add_argument("--nmax", type=int,
                           help="top of the n ladder (5 evenly spaced rungs)")
    p_density.add_argument("--ladder", help="explicit comma-separated n ladder")
    p_density.add_argument("--grid", help="x grid as LO:HI:STEP (rationals)")
    p_density.add_argument("--tol", help="fit validation tolerance (rational)")
    p_density.add_argument("--richardson", action="store_true",
                           help="two-point Richardson extrapolation in 1/n")
    p_density.add_argument("--fit", action="store_true",
                           help="fit exact chamber polynomials (adic only)")
    p_density.add_argument("--csv-out", help="CSV output path")
    _add_common(p_density)
    p_density.set_defaults(func=_cmd_density)

    p_mult = sub.add_parser("multiplicity", help="epsilon/diagonal/mixed multiplicities")
    p_mult.add_argument("--module", required=True,
                        help="module document path (or corpus:<name>)")
    p_mult.add_argument("--epsilon", action="store_true", help="epsilon multiplicity")
    p_mult.add_argument("--diagonal", action="store_true",
                        help="diagonal multiplicities along m = c*n")
    p_mult.add_argument("--mixed", action="store_true", help="mixed multiplicities")
    p_mult.add_argument("--extended", action="store_true",
                        help="extended (cumulative) mixed multiplicities")
    p_mult.add_argument("--c", type=int, help="diagonal slope (default d_M + 1)")
    p_mult.add_argument("--nmax", type=int, help="top of the n ladder (1..nmax)")
    p_mult.add_argument("--ladder", help="explicit comma-separated n ladder")
    p_mult.add_argument("--tol", help="epsilon cross-check tolerance (rational)")
    _add_common(p_mult)
    p_mult.set_defaults(func=_cmd_multiplicity)

    p_check = sub.add_parser("check", help="decide integral dependence N <= M")
    p_check.add_argument("--sub", required=True, help="candidate reduction N")
    p_check.add_argument("--sup", required=True, help="module M")
    p_check.add_argument("--c", type=int, help="diagonal slope (default d+1)")
    p_check.add_argument("--nmax", type=int, default=12,
                         help="certificate search bound (default 12)")
    p_check.add_argument("--ladder", help="explicit comma-separated n ladder")
    p_check.add_argument("--both-c", action="store_true",
                         help="repeat the diagonal criteria at c + 1")
    _add_common(p_check)
    p_check.set_defaults(func=_cmd_check)

    p_corpus = sub.add_parser("corpus", help="list bundled example modules")
    p_corpus.add_argument("--show", help="print one corpus module document")
    p_corpus.set_defaults(func=_cmd_corpus)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FitNotConvergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNDETERMINED
    except InternalInvariantError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
