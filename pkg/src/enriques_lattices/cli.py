"""Command-line interface: ``enriques-lattices <subcommand> ...``.

Exit codes: 0 success, 1 verification or budget failure, 2 usage error.
Results go to stdout; progress and diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from collections import Counter
from dataclasses import dataclass, field

from .defenum import IndefiniteError, roots
from .discform import (
    DiscFormError,
    count_isotropy,
    d_n_space,
    discriminant_form,
    group_order,
    signature_mod8,
    transvection_group,
)
from .genus import (
    BudgetExceeded,
    GenusError,
    InvariantViolation,
    enumerate_genus,
    enumerate_genus_cached,
    resolve_cache_dir,
)
from .lattice import LatticeError, parse_lattice
from .moduli import classify_enumeration, find_trivial_aut_class, gamma_image_lower

log = logging.getLogger("enriques_lattices.cli")
FORMATS = ("json", "csv", "md")
CSV_HEADER = ["d", "class_index", "half_roots", "aut_order", "verdict"]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    cache_dir: str | None = None
    primes: list = field(default_factory=lambda: [2, 3])
    budget_secs: float | None = None
    output_format: str = "md"
    seed: int | None = None

    def __post_init__(self):
        if not self.primes:
            raise UsageError("--primes must name at least one prime")
        for p in self.primes:
            if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
                raise UsageError(f"--primes: {p} is not prime")
        if self.output_format not in FORMATS:
            raise UsageError(f"--format must be one of {', '.join(FORMATS)}")

    def enumerate(self, d):
        kwargs = dict(primes=tuple(self.primes), seed=self.seed, budget_secs=self.budget_secs)
        if self.cache_dir is None:
            return enumerate_genus(d, **kwargs)
        return enumerate_genus_cached(d, self.cache_dir, **kwargs)


def _primes(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected a comma-separated list of primes")


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache-dir", help="directory for genus_d{d}.json (ENRIQUES_CACHE overrides)")
    common.add_argument("--no-cache", action="store_true", help="ignore any cache directory")
    common.add_argument("--primes", type=_primes, default=[2, 3], help="neighbour primes, e.g. 2,3")
    common.add_argument("--format", choices=FORMATS, default="md", dest="output_format")
    common.add_argument("--seed", type=int, default=None, help="shuffles traversal order only")
    common.add_argument("--budget-secs", type=float, default=None, help="time cap per degree")
    common.add_argument("-q", "--quiet", action="store_true", help="no progress on stderr")
    return common


def build_parser():
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="enriques-lattices",
                                     description="Lattice and genus computations for polarized Enriques moduli.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add("lattice-info", "rank, signature, determinant and discriminant group")
    p.add_argument("lattice", help="name (e.g. N, U+E8(-1)) or JSON Gram matrix")
    p = add("roots", "root pairs of a definite lattice")
    p.add_argument("lattice")
    p.add_argument("--list", action="store_true", help="also print the roots")
    p = add("disc", "discriminant quadratic form")
    p.add_argument("lattice")
    p = add("genus", "all classes in the genus of <-2d> + E8(-1)")
    p.add_argument("d", type=int)
    for name, text in (("table", "half-count table over a range of d"),
                       ("classify", "Kodaira verdicts per class over a range of d")):
        p = add(name, text)
        p.add_argument("--min-d", type=int, default=2)
        p.add_argument("--max-d", type=int, default=21)
    p.add_argument("--degree", type=int, help="a single even degree 2d (overrides the range)")
    p.add_argument("--gamma", action="store_true", help="also report the reflection-image order")
    p = add("group-order", "order of a subgroup of O(D_N)")
    p.add_argument("--d", type=int, help="with --class-index: image of the reflections of that class")
    p.add_argument("--class-index", type=int, default=0)
    p = add("find-trivial-aut", "first class with isometry group {+-1}")
    p.add_argument("--min-d", type=int, default=1)
    p.add_argument("--max-d", type=int, default=21)
    p = add("verify", "run the acceptance checks")
    p.add_argument("--quick", action="store_true", help="restrict to d <= 8")
    return parser


# ---------------------------------------------------------------------------
# formatting helpers


def group_shape(divisors) -> str:
    divs = [d for d in divisors if d > 1]
    if not divs:
        return "trivial"
    parts = []
    for n, k in sorted(Counter(divs).items()):
        parts.append(f"Z/{n}" if k == 1 else f"(Z/{n})^{k}")
    return " x ".join(parts)


def _signed(n: int) -> str:
    return f"−{-n}" if n < 0 else str(n)


def _emit(obj, fmt, out):
    if fmt == "json":
        json.dump(obj, out, indent=1, sort_keys=False)
        out.write("\n")
    else:
        out.write(obj if obj.endswith("\n") else obj + "\n")


def _csv_rows(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands


def cmd_lattice_info(args, cfg, out):
    lat = _parse(args.lattice)
    form = discriminant_form(lat)
    p, m = lat.signature
    shape = group_shape(form.divisors)
    disc = "D trivial" if shape == "trivial" else f"D ≅ {shape}"
    if cfg.output_format == "json":
        _emit({"rank": lat.rank, "signature": [p, m], "det": lat.det, "even": lat.is_even,
               "discriminant_divisors": [d for d in form.divisors if d > 1]}, "json", out)
    else:
        out.write(f"rank {lat.rank}, sig ({p},{m}), det {_signed(lat.det)}, {disc}\n")
        out.write(f"{'even' if lat.is_even else 'odd'}\n")
    return 0


def cmd_roots(args, cfg, out):
    lat = _parse(args.lattice)
    r = roots(lat)
    if cfg.output_format == "json":
        obj = {"half_count": len(r)}
        if args.list:
            obj["roots"] = r.tolist()
        _emit(obj, "json", out)
    else:
        out.write(f"root pairs: {len(r)}\n")
        if args.list:
            for row in r.tolist():
                out.write(" ".join(str(x) for x in row) + "\n")
    return 0


def cmd_disc(args, cfg, out):
    lat = _parse(args.lattice)
    form = discriminant_form(lat)
    obj = {"divisors": [d for d in form.divisors if d > 1], "order": form.order,
           "signature_mod8": signature_mod8(form)}
    if form.order <= 2**20:
        iso, noniso = count_isotropy(form)
        obj.update(isotropic_nonzero=iso, nonisotropic=noniso)
    if cfg.output_format == "json":
        obj["form"] = form.to_json()
        _emit(obj, "json", out)
    else:
        out.write(f"D ≅ {group_shape(form.divisors)}, order {form.order}, "
                  f"signature mod 8 = {obj['signature_mod8']}\n")
        if "nonisotropic" in obj:
            out.write(f"isotropic nonzero {obj['isotropic_nonzero']}, nonisotropic {obj['nonisotropic']}\n")
    return 0


def _enumerations(cfg, ds, progress):
    """Yield enumerations in order of d; stops at the first exhausted budget."""
    for d in ds:
        progress(f"d={d}: enumerating")
        yield d, cfg.enumerate(d)


def cmd_genus(args, cfg, out, progress):
    if args.d < 1:
        raise UsageError("d must be positive")
    e = cfg.enumerate(args.d)
    if cfg.output_format == "json":
        _emit(e.to_json(), "json", out)
    elif cfg.output_format == "csv":
        report = classify_enumeration(e)
        out.write(_csv_rows(_class_rows(report)))
    else:
        out.write(e.row() + "\n")
    return 0


def _class_rows(report):
    return [[report.d, i, c.half_count, c.genus_class.aut_order, c.verdict.value]
            for i, c in enumerate(report.classes)]


def _range(args):
    if args.min_d < 1 or args.max_d < args.min_d:
        raise UsageError("need 1 <= --min-d <= --max-d")
    return range(args.min_d, args.max_d + 1)


def cmd_table(args, cfg, out, progress, classify=False):
    ds = _range(args)
    if classify and args.degree is not None:
        if args.degree < 2 or args.degree % 2:
            raise UsageError("--degree must be even and at least 2")
        ds = [args.degree // 2]
    reports, partial = [], None
    try:
        for d, e in _enumerations(cfg, ds, progress):
            reports.append((e, classify_enumeration(e, with_gamma=classify and args.gamma)))
    except BudgetExceeded as exc:
        partial = str(exc)
    fmt = cfg.output_format
    if fmt == "json":
        if classify:
            obj = [r.to_json() for _, r in reports]
        else:
            obj = [e.to_json() for e, _ in reports]
        if partial:
            obj = {"partial": True, "reason": partial, "results": obj}
        _emit(obj, "json", out)
    elif fmt == "csv":
        rows = [row for _, r in reports for row in _class_rows(r)]
        out.write(_csv_rows(rows))
    else:
        for e, r in reports:
            out.write((r.markdown_row() if classify else e.row()) + "\n")
        if partial:
            out.write(f"<!-- partial: {partial} -->\n")
    if partial:
        print(f"error: {partial}; results above are partial", file=sys.stderr)
        return 1
    return 0


def cmd_group_order(args, cfg, out, progress):
    if args.d is None:
        group = transvection_group(d_n_space())
        label = "all transvections of D_N"
    else:
        e = cfg.enumerate(args.d)
        if not 0 <= args.class_index < len(e.classes):
            raise UsageError(f"--class-index must be below {len(e.classes)}")
        group = gamma_image_lower(e.classes[args.class_index].representative)
        label = f"reflections of class {args.class_index} at d={args.d} (lower bound)"
    progress("computing stabilizer chain")
    order = group_order(group)
    if cfg.output_format == "json":
        _emit({"group": label, "generators": len(group.generators), "order": order}, "json", out)
    else:
        out.write(f"{label}: order {order}\n")
    return 0


def cmd_find_trivial_aut(args, cfg, out, progress):
    _range(args)
    found = find_trivial_aut_class((args.min_d, args.max_d), enumerate=lambda d: cfg.enumerate(d))
    if found is None:
        obj = {"found": False, "range": [args.min_d, args.max_d]}
        text = f"no class with isometry group {{+-1}} for d in {args.min_d}..{args.max_d}"
    else:
        d, gc = found
        obj = {"found": True, "d": d, "gram": gc.representative.matrix(), "aut_order": gc.aut_order}
        text = f"d={d}: {json.dumps(gc.representative.matrix())} (aut order {gc.aut_order})"
    _emit(obj if cfg.output_format == "json" else text, cfg.output_format, out)
    return 0


def cmd_verify(args, cfg, out, progress):
    from .acceptance import run_all
    results = run_all(quick=args.quick, cache_dir=cfg.cache_dir, progress=progress)
    for r in results:
        out.write(r.line() + "\n")
    failed = [r for r in results if not r.passed]
    out.write(f"{len(results) - len(failed)}/{len(results)} checks passed\n")
    return 1 if failed else 0


def _parse(text):
    try:
        return parse_lattice(text)
    except (LatticeError, ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot parse lattice {text!r}: {exc}") from exc


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = sys.stdout

    def progress(msg):
        if not args.quiet:
            print(msg, file=sys.stderr, flush=True)

    try:
        cache_dir = None if args.no_cache else resolve_cache_dir(args.cache_dir)
        cfg = RunConfig(cache_dir, args.primes, args.budget_secs, args.output_format, args.seed)
        cmd = args.command
        if cmd == "lattice-info":
            return cmd_lattice_info(args, cfg, out)
        if cmd == "roots":
            return cmd_roots(args, cfg, out)
        if cmd == "disc":
            return cmd_disc(args, cfg, out)
        if cmd == "genus":
            return cmd_genus(args, cfg, out, progress)
        if cmd == "table":
            return cmd_table(args, cfg, out, progress)
        if cmd == "classify":
            return cmd_table(args, cfg, out, progress, classify=True)
        if cmd == "group-order":
            return cmd_group_order(args, cfg, out, progress)
        if cmd == "find-trivial-aut":
            return cmd_find_trivial_aut(args, cfg, out, progress)
        if cmd == "verify":
            return cmd_verify(args, cfg, out, progress)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except IndefiniteError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return 1
    except (BudgetExceeded, GenusError, DiscFormError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    parser.error(f"unknown command {args.command}")
    return 2


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
