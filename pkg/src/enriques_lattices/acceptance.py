"""End-to-end checks of the reference numbers and of the engine contracts.

Each ``check_*`` function returns a :class:`CheckResult`; :func:`run_all`
runs them in order against one shared enumeration memo so that every genus
is enumerated at most once per run.
"""

from __future__ import annotations

import itertools
import random
import sys
import time
from dataclasses import dataclass

import numpy as np

from .defenum import IsometryWitness, is_isometric, short_vectors
from .discform import (
    O_PLUS_10_2,
    count_isotropy,
    d_n_space,
    discriminant_form,
    group_order,
    signature_mod8,
    transvection_group,
)
from .genus import enumerate_genus, enumerate_genus_cached, resolve_cache_dir
from .lattice import Lattice, divisor, l_ev, l_odd, make_named, parse_lattice
from .moduli import (
    THRESHOLD,
    Verdict,
    bound_max_R,
    classify_enumeration,
    congruence_check,
    second_orbit_witness,
)

# half-counts of root pairs per class, d = 2..21
REFERENCE_TABLE = {
    2: [120, 72],
    3: [120, 66],
    4: [120, 56],
    5: [120, 64, 45],
    6: [120, 56, 42],
    7: [120, 64, 43],
    8: [120, 64, 56, 36],
    9: [120, 64, 39, 37],
    10: [120, 56, 42, 30],
    11: [120, 64, 63, 36, 33],
    12: [120, 56, 39, 29],
    13: [120, 64, 42, 38, 29],
    14: [120, 63, 56, 43, 36, 26],
    15: [120, 64, 39, 31, 25],
    16: [120, 64, 56, 42, 28, 26],
    17: [120, 64, 63, 43, 37, 36, 29, 24],
    18: [120, 56, 42, 39, 26, 23],
    19: [120, 64, 63, 42, 31, 28, 24],
    20: [120, 63, 56, 36, 31, 28, 20],
    21: [120, 64, 39, 37, 29, 25, 23],
}
INCONCLUSIVE_HALF_COUNTS = {17: 24, 18: 23, 19: 24, 20: 20, 21: 23}
FULL_ORDER = 2**21 * 3**5 * 5**2 * 7 * 17 * 31
NAMED_SUITE = [
    "U", "U(2)", "<2>", "<-2>", "<-4>", "<6>", "A1", "A2", "A3", "A4", "A2(-1)",
    "D4", "D5", "D9(-1)", "E6", "E7", "E7(-1)", "E8", "E8(-1)", "E8(-2)", "M", "N",
    "L_K3", "<-4>+E8(-1)", "A2(-1)+E7(-1)", "U+U(2)+E8(-1)",
]


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    expected: str
    actual: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"[{status}] {self.number}. {self.name} ({self.seconds:.1f}s)"
        if not self.passed:
            text += f": expected {self.expected}; got {self.actual}"
        return text


class Context:
    """Shared settings and enumeration memo for one acceptance run."""

    def __init__(self, quick=False, cache_dir=None, progress=None):
        self.quick = quick
        self.cache_dir = resolve_cache_dir(cache_dir)
        self.progress = progress or (lambda msg: None)
        self._enums = {}
        self.fresh_seconds = {}

    @property
    def d_max(self):
        return 8 if self.quick else 21

    def enumeration(self, d):
        if d not in self._enums:
            self.progress(f"enumerating genus for d={d}")
            t = time.monotonic()
            if self.cache_dir is None:
                self._enums[d] = enumerate_genus(d)
                self.fresh_seconds[d] = time.monotonic() - t
            else:
                self._enums[d] = enumerate_genus_cached(d, self.cache_dir)
        return self._enums[d]


def _timed(number, name, fn, ctx):
    t = time.monotonic()
    try:
        passed, expected, actual = fn(ctx)
    except Exception as exc:  # a crash is a failed check, reported with its cause
        passed, expected, actual = False, "no error", f"{type(exc).__name__}: {exc}"
    return CheckResult(number, name, passed, expected, actual, time.monotonic() - t)


# ---------------------------------------------------------------------------


def check_genus_table(ctx):
    bad = []
    for d in range(2, ctx.d_max + 1):
        got = ctx.enumeration(d).half_counts
        if got != REFERENCE_TABLE[d]:
            bad.append(f"d={d}: {got}")
    limits = [(8, 120.0)] + ([] if ctx.quick else [(21, 45 * 60.0)])
    for top, secs in limits:
        if all(d in ctx.fresh_seconds for d in range(2, top + 1)):
            spent = sum(ctx.fresh_seconds[d] for d in range(2, top + 1))
            if spent > secs:
                bad.append(f"d<={top} took {spent:.0f}s > {secs:.0f}s")
    return not bad, f"reference rows for d=2..{ctx.d_max}", "; ".join(bad) or "all rows equal"


def check_d1(ctx):
    got = ctx.enumeration(1).half_counts
    return got == [121], "[121]", str(got)


def check_verdicts(ctx):
    bad = []
    for d in range(1, ctx.d_max + 1):
        report = classify_enumeration(ctx.enumeration(d))
        if d <= 16:
            if not report.all_negative:
                bad.append(f"2d={2 * d}: not all negative")
        else:
            inc = [c.half_count for c in report.classes if c.verdict is Verdict.INCONCLUSIVE]
            if inc != [INCONCLUSIVE_HALF_COUNTS[d]]:
                bad.append(f"2d={2 * d}: inconclusive {inc}")
    rng = "2..32" if ctx.quick is False else f"2..{2 * ctx.d_max}"
    exp = f"all negative for 2d in {rng}" + ("" if ctx.quick else "; one inconclusive 24,23,24,20,23 for 34..42")
    return not bad, exp, "; ".join(bad) or "as expected"


def check_group_constants(ctx):
    t = time.monotonic()
    iso, noniso = count_isotropy(discriminant_form(make_named("N")))
    order = group_order(transvection_group(d_n_space()))
    spent = time.monotonic() - t
    ok = noniso == 496 and order == FULL_ORDER == O_PLUS_10_2 and spent <= 60
    return ok, f"496 nonisotropic, order {FULL_ORDER}, <=60s", \
        f"{noniso} nonisotropic, order {order}, {spent:.1f}s"


def check_threshold(ctx):
    b = bound_max_R(10, 4, 124, 496)
    return b == 24 and THRESHOLD == 25, "bound 24, threshold 25", f"bound {b}, threshold {THRESHOLD}"


def check_orbit_geometry(ctx):
    n = make_named("N")
    div = (divisor(l_odd(), n), divisor(l_ev(), n))
    got = [f"divisors {div}"]
    ok = div == (1, 2)
    targets = {2: parse_lattice("D9(-1)"), 3: parse_lattice("A2(-1)+E7(-1)")}
    for d, target in targets.items():
        classes = ctx.enumeration(d).classes
        w = is_isometric(classes[1].representative, target)
        hw = second_orbit_witness(2 * d)
        good = all(isinstance(x, IsometryWitness) and x.check() for x in (w, hw))
        ok = ok and good
        got.append(f"degree {2 * d}: {'witnessed' if good else 'no witness'}")
    return ok, "divisors (1, 2); D9(-1) and A2(-1)+E7(-1) witnessed", ", ".join(got)


def _box_scan(gram, target):
    """Vectors of norm ``target`` (positive definite gram) by a coordinate box."""
    g = np.array(gram, dtype=np.int64)
    n = len(g)
    # |x_i|^2 <= target * (G^-1)_ii bounds every coordinate
    ginv = np.linalg.inv(g.astype(float))
    box = [int(np.floor(np.sqrt(target * ginv[i, i]) + 1e-9)) for i in range(n)]
    count = 0
    for x in itertools.product(*[range(-b, b + 1) for b in box]):
        v = np.array(x)
        if v @ g @ v == target:
            count += 1
    return count


def small_definite_suite(count=12, seed=20240601):
    """Named rank <= 5 lattices plus seeded random even forms of rank 2..4."""
    names = ["A1", "A2", "A3", "A4", "A5", "D4", "D5", "<4>", "<6>", "A2(2)", "A1+A1", "A1+<4>",
             "A2(-1)", "D4(-1)", "<-2>+<-6>"]
    lats = [parse_lattice(x) for x in names]
    rng = random.Random(seed)
    while len(lats) < len(names) + count:
        n = rng.randint(2, 4)
        b = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        g = [[2 * sum(b[k][i] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        try:
            lat = Lattice(g)
        except ValueError:
            continue
        if lat.is_definite and abs(lat.det) < 5000:
            lats.append(lat)
    return lats


def check_properties(ctx):
    failures = []
    for lat in small_definite_suite():
        sign = 1 if lat.signature[0] else -1
        pos = [[sign * x for x in row] for row in lat.gram]
        for k in range(1, 9):
            if short_vectors(lat, sign * k, "count") != _box_scan(pos, k):
                failures.append(f"short_vectors {lat.name or lat.gram} norm {k}")
    edges = 0
    for d in range(1, ctx.d_max + 1):
        e = ctx.enumeration(d)
        edges += e.edges_checked
        for i, c in enumerate(e.classes):
            if not congruence_check(c.representative):
                failures.append(f"congruence d={d} class {i}")
    for name in NAMED_SUITE:
        lat = parse_lattice(name)
        form = discriminant_form(lat)
        if form.order != abs(lat.det):
            failures.append(f"|D| for {name}")
        p, m = lat.signature
        if signature_mod8(form) != (p - m) % 8:
            failures.append(f"signature mod 8 for {name}")
    actual = "; ".join(failures) or f"all agree ({edges} neighbour edges checked)"
    return not failures, "box-scan, edge, congruence, |D|, mod-8 checks all hold", actual


def check_determinism(ctx):
    from .cli import main
    import io
    import contextlib

    outs = []
    top = min(ctx.d_max, 8)
    for seed in (1, 2):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(io.StringIO()):
            code = main(["table", "--min-d", "1", "--max-d", str(top), "--format", "csv",
                         "--seed", str(seed), "--no-cache"])
        outs.append((code, buf.getvalue()))
    same = outs[0] == outs[1] and outs[0][0] == 0
    return same, "identical output for seeds 1 and 2", "identical" if same else "outputs differ"


CHECKS = [
    (1, "genus table reproduction", check_genus_table),
    (2, "d = 1 has one class with 121 root pairs", check_d1),
    (3, "Kodaira verdicts", check_verdicts),
    (4, "finite group constants", check_group_constants),
    (5, "threshold self-consistency", check_threshold),
    (6, "orbit geometry", check_orbit_geometry),
    (7, "property suites", check_properties),
    (8, "determinism under --seed", check_determinism),
]


def run_all(quick=False, cache_dir=None, progress=None, only=None):
    ctx = Context(quick=quick, cache_dir=cache_dir, progress=progress)
    results = []
    for number, name, fn in CHECKS:
        if only is not None and number not in only:
            continue
        if progress:
            progress(f"check {number}: {name}")
        results.append(_timed(number, name, fn, ctx))
    return results


def main(argv=None):
    results = run_all(progress=lambda m: print(m, file=sys.stderr))
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
