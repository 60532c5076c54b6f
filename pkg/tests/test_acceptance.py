"""Acceptance criteria 1-10, one PASS/FAIL line each, repeated at the end of the pytest summary."""

import io
import time
from contextlib import redirect_stdout

import numpy as np

from stablepoly import construct as C
from stablepoly.cli import dispatch
from stablepoly.factcheck import FACT_SUITES, bezout_pointwise_error, ppos_counterexample_roots, run_suite
from stablepoly.interlace import Region, Relation, check_relation, hermite_biehler_check, ratio_region_check
from stablepoly.polycore import MultiPoly, UniPoly, evaluate, parse_text
from stablepoly.stability import SamplerConfig, Unstable, decide, necessary_battery, refute_many, witness_ok
from stablepoly.uniroots import hurwitz_verdict, p_interlaces, roots_batch


LINES: dict[int, str] = {}  # echoed in the terminal summary by conftest


def report(n: int, ok: bool, detail: str) -> None:
    LINES[n] = f"ACCEPTANCE {n:2d} {'PASS' if ok else 'FAIL'}  {detail}"
    print("\n" + LINES[n])
    assert ok, detail


def test_01_bilinear_closed_form():
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    abcd = rng.uniform(0.05, 5.0, size=(100, 4))
    r = 10 ** rng.uniform(-3, 1, size=100)
    s = rng.uniform(-5, 5, size=100)
    x = r + 1j * s
    a, b, c, d = (abcd[:, k, None] for k in range(4))
    # f(x, y) = a + b x + c y + d x y as a linear polynomial in y, one row per (params, point)
    rows = np.stack([(a + b * x).ravel(), (c + d * x).ravel()], axis=1)
    y = np.array([z[0] for z in roots_batch(rows)]).reshape(100, 100)
    R, S = r[None, :], s[None, :]
    closed = -(a * c + b * c * R + a * d * R + b * d * R**2 + b * d * S**2) / ((c + d * R) ** 2 + d**2 * S**2)
    rel = np.max(np.abs(closed - y.real) / np.abs(y.real))
    negative = bool(np.all(closed < 0) and np.all(y.real < 0))
    elapsed = time.perf_counter() - start
    report(1, rel < 1e-10 and negative and elapsed < 1.0,
           f"10^4 zeros: max rel err {rel:.2e}, all Re(y) < 0: {negative}, {elapsed:.3f}s")


def test_02_counterexample_regression():
    start = time.perf_counter()
    roots = ppos_counterexample_roots()
    quadrants = bool(np.all(roots.real < 0) and sorted(np.sign(roots.imag)) == [-1, 1])
    f, g = parse_text("x1*(x1+3)"), parse_text("(x1+1)*(x1+2)")
    got = {rel: check_relation(f, g, rel).holds for rel in (Relation.Psim, Relation.P, Relation.Hsim, Relation.H)}
    want = {Relation.Psim: "yes", Relation.P: "no", Relation.Hsim: "yes", Relation.H: "yes"}
    v = decide(parse_text("x1^2 + x2"))
    refuted = isinstance(v, Unstable) and witness_ok(parse_text("x1^2 + x2"), v.witness)
    elapsed = time.perf_counter() - start
    ok = quadrants and got == want and refuted and elapsed < 5
    report(2, ok, f"roots {np.round(roots, 4)}, relations {({k.value: x for k, x in got.items()})}, "
                  f"x^2+y witness {v.witness if refuted else None}, {elapsed:.2f}s")


CLOSURE = [f"lots-elem-{k}" for k in ("1a", "1b", "1c", "1d", "1e", "1f", "2", "3", "4", "5", "6")] + [f"elem2-{k}" for k in range(1, 5)]


def test_03_closure_suites():
    start = time.perf_counter()
    reports = [run_suite(sid, trials=200, seed=0) for sid in CLOSURE]
    elapsed = time.perf_counter() - start
    refs = {r.suite: len(r.refutations) for r in reports if r.refutations}
    skips = sum(r.skips for r in reports)
    report(3, not refs and elapsed < 180,
           f"{len(CLOSURE)} suites x 200 trials, refutations {refs or 0}, skips {skips}, {elapsed:.1f}s")


def test_04_determinant_constructions():
    rng = np.random.default_rng(4)
    bad = []
    for tail in C.TAIL_KINDS:
        polys = []
        for _ in range(50):
            spec = C.PencilSpec.random(int(rng.integers(1, 5)), int(rng.integers(1, 4)), tail, rng)
            p = C.det_pencil(spec).poly
            polys.append(p)
            if not necessary_battery(p):
                bad.append((tail, "battery"))
            if tail != "imagsym":
                c = np.array(list(p.terms.values()))
                if np.any(c.imag != 0) or not (np.all(c.real > 0) or np.all(c.real < 0)):
                    bad.append((tail, "sign"))
        for d in sorted({p.nvars for p in polys}):
            group = [p for p in polys if p.nvars == d]
            verdicts = refute_many(group, SamplerConfig(trials=1000, seed=int(rng.integers(2**31))))
            bad += [(tail, "witness") for v in verdicts if isinstance(v, Unstable)]
    report(4, not bad, f"150 pencils over tails {C.TAIL_KINDS}, 1000 restrictions each, failures {bad or 0}")


def _planted(rng) -> UniPoly:
    base = C.random_hurwitz_real(int(rng.integers(0, 6)), rng)
    if rng.uniform() < 0.5:
        return base * UniPoly([-float(rng.uniform(0.01, 3.0)), 1.0])
    re, im = rng.uniform(0.01, 3.0), rng.uniform(0.1, 3.0)
    return base * UniPoly([re * re + im * im, -2 * re, 1.0])


def test_05_hermite_biehler():
    rng = np.random.default_rng(5)
    cfg = SamplerConfig(trials=200)
    disagree, boundary = [], 0
    for k in range(200):
        p = C.random_hurwitz_real(int(rng.integers(1, 9)), rng) if k % 2 == 0 else _planted(rng)
        hv = hurwitz_verdict(p)
        if abs(hv.margin) <= 1e-6:
            boundary += 1
            continue
        hb = hermite_biehler_check(p.to_multi(), cfg)
        if (hb.holds != "no") != hv.stable:
            disagree.append((k, hb.holds, hv.stable))
    report(5, not disagree, f"200 polynomials, {boundary} boundary cases skipped, disagreements {disagree or 0}")


def test_06_ratio_criteria_cross_validation():
    rng = np.random.default_rng(6)
    p_bad = []
    for k in range(100):
        f = C.random_ppos1(int(rng.integers(1, 6)), rng)
        if k % 2 == 0:
            roots = np.sort(np.roots(f.coeffs[::-1]).real)
            g = C.interlacing_partner(roots, rng, same_degree=bool(rng.uniform() < 0.5))
        else:
            g = C.random_ppos1(max(f.degree - int(rng.integers(0, 2)), 1), rng)
        exact = p_interlaces(f, g)
        ratio = ratio_region_check(f, g, Region.Quadrant1, seed=k)
        if bool(ratio) != exact:
            p_bad.append((k, exact, bool(ratio), f, g))
    h_bad = []
    for k in range(100):
        f = C.random_hurwitz_real(int(rng.integers(1, 7)), rng)
        t = float(10 ** rng.uniform(-2, 1))
        g = f + f.deriv() * t  # f <-H f' so f + r(f + t f') stays stable for r > 0
        ratio = ratio_region_check(f, g, Region.SlitPlane, seed=k)
        if not ratio:
            h_bad.append(k)
    example = ""
    if p_bad:
        _, _, _, f0, g0 = p_bad[0]
        example = f"; first: f roots {np.round(np.sort(np.roots(f0.coeffs[::-1]).real), 3)}, g roots {np.round(np.sort(np.roots(g0.coeffs[::-1]).real), 3)}"
    report(6, not p_bad and not h_bad,
           f"<-P vs Quadrant1: {len(p_bad)}/100 disagree "
           f"({sum(1 for _, e, q, *_ in p_bad if q and not e)} with ratio inside Q1 but no root interlacing); "
           f"~H vs SlitPlane: {len(h_bad)}/100 disagree{example}")


def test_07_christoffel_darboux():
    worst_res, worst_re = 0.0, -np.inf
    for family in (C.OrthoFamily.legendre(), C.OrthoFamily.chebyshev_t(), C.OrthoFamily.hermite_e()):
        for n in range(9):
            total, det = C.christoffel_darboux(family, n)
            res = np.max(np.abs((total - det).coeffs), initial=0.0) / np.max(np.abs(total.coeffs))
            worst_res = max(worst_res, res)
            if total.degree >= 1:
                worst_re = max(worst_re, float(np.max(np.roots(total.coeffs[::-1]).real)))
    report(7, worst_res < 1e-8 and worst_re <= 1e-9,
           f"3 families, n <= 8: max residual {worst_res:.2e}, max root real part {worst_re:.3g}")


def test_08_bezout_wronskian():
    rng = np.random.default_rng(8)
    cfg = SamplerConfig(trials=200, seed=8)
    refuted, worst, pairs = [], 0.0, 0
    while pairs < 100:
        f = C.random_ppos1(int(rng.integers(1, 6)), rng)
        roots = np.sort(np.roots(f.coeffs[::-1]).real)
        g = C.interlacing_partner(roots, rng, same_degree=bool(rng.uniform() < 0.5))
        if not p_interlaces(f, g):
            continue
        pairs += 1
        w = C.wronskian(f, g)
        if not w.is_zero() and w.degree >= 1 and not hurwitz_verdict(w).stable:
            refuted.append((pairs, "wronskian"))
        B = C.bezout(f, g)
        if not B.is_zero() and isinstance(decide(B, cfg), Unstable):
            refuted.append((pairs, "bezout"))
        worst = max(worst, bezout_pointwise_error(f, g, B, rng))
    report(8, not refuted and worst < 1e-10,
           f"100 verified pairs: refuted {refuted or 0}, bezout pointwise rel err {worst:.2e}")


def test_09_hadamard():
    rng = np.random.default_rng(9)
    refuted = []
    for k in range(200):
        f = C.random_hurwitz_real(int(rng.integers(1, 9)), rng)
        g = C.random_hurwitz_real(int(rng.integers(1, 9)), rng)
        h = UniPoly.from_multi(C.hadamard(f, g.to_multi(), 0))
        if h.is_zero() or h.degree < 1:
            continue
        if not hurwitz_verdict(h).stable:
            refuted.append(k)
    report(9, not refuted, f"200 pairs of degree <= 8: refuted {refuted or 0}")


def test_10_verify_all_deterministic():
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        with redirect_stdout(buf):
            code = dispatch(["verify", "--suite", "all", "--seed", "0", "--format", "json"])
        outs.append(buf.getvalue())
    same = outs[0] == outs[1]
    report(10, same and bool(outs[0]),
           f"{len(FACT_SUITES)} suites twice, identical JSON: {same} ({len(outs[0])} bytes, exit {code})")


def test_bilinear_is_a_multipoly_check():
    # sanity for criterion 1: the batch solve agrees with direct evaluation
    f = MultiPoly(2, {(0, 0): 1.0, (1, 0): 2.0, (0, 1): 3.0, (1, 1): 4.0})
    x = 0.5 + 2j
    y = roots_batch(np.array([[1 + 2 * x, 3 + 4 * x]]))[0][0]
    assert abs(evaluate(f, (x, y))) < 1e-12
