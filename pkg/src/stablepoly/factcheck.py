"""Randomized property suites for the stable-polynomial facts, plus two open-question probes.

Each suite draws ``trials`` independent inputs from a generator seeded by
(seed, trial index), so reports are reproducible.  A trial ends as a pass,
a skip (inconclusive, e.g. a refuter that found nothing to confirm a
negative), or a refutation carrying the offending polynomial and witness.
Probe suites only record observations and never fail.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import construct as C
from .interlace import RATIO_TARGET, Relation, check_relation, hermite_biehler_check, hsim_root_locus, jsonable, ratio_region_check
from .polycore import (
    AffineSubstitution,
    FixImaginary,
    FixValue,
    Keep,
    MultiPoly,
    RenameTo,
    Scale,
    Shift,
    SplitSum,
    UniPoly,
    affine_substitute,
    coefficient_slice,
    coefficient_slices,
    even_odd_parts,
    evaluate,
    partial_derivative,
    reverse_in_var,
    top_homogeneous,
)
from .preservers import apply_diffop, apply_mixed, exp_mixed
from .stability import SamplerConfig, Unstable, decide, join_with_fresh_var
from .uniroots import all_roots, common_interlacer, hurwitz_verdict

SUITE_MC = 64
CLOSURE_TRIALS = 200
CONSTRUCTION_TRIALS = 50


class Skip(Exception):
    """Trial is inconclusive."""


@dataclass
class Refutation:
    input: MultiPoly | None
    witness: object
    reason: str
    context: dict = field(default_factory=dict)

    def to_json(self, trial: int) -> dict:
        return {
            "trial": trial,
            "input": None if self.input is None else self.input.to_json(),
            "witness": jsonable(self.witness),
            "reason": self.reason,
            "context": jsonable(self.context),
        }


@dataclass
class Ctx:
    rng: np.random.Generator
    cfg: SamplerConfig
    trial: int


@dataclass(frozen=True)
class Suite:
    id: str
    claim: str
    body: Callable[[Ctx], object]
    trials: int = CLOSURE_TRIALS
    probe: bool = False
    mc: int = SUITE_MC


@dataclass
class SuiteReport:
    suite: str
    trials: int
    passes: int
    refutations: list
    skips: int
    seed: int
    ms: float | None = None
    records: list = field(default_factory=list)
    probe: bool = False

    @property
    def ok(self) -> bool:
        return self.probe or not self.refutations

    def to_json(self, timing: bool = True) -> dict:
        out = {
            "suite": self.suite,
            "trials": self.trials,
            "passes": self.passes,
            "refutations": self.refutations,
            "skips": self.skips,
            "seed": self.seed,
            "probe": self.probe,
            "records": self.records,
        }
        if timing and self.ms is not None:
            out["ms"] = self.ms
        return out

    @classmethod
    def from_json(cls, data: dict) -> "SuiteReport":
        return cls(
            suite=data["suite"],
            trials=int(data["trials"]),
            passes=int(data["passes"]),
            refutations=list(data["refutations"]),
            skips=int(data.get("skips", 0)),
            seed=int(data["seed"]),
            ms=data.get("ms"),
            records=list(data.get("records", [])),
            probe=bool(data.get("probe", False)),
        )


# -- generators -------------------------------------------------------------------------


def _stable(ctx: Ctx, real: bool = False, nvars: int | None = None, degree: int | None = None, recipe=None) -> MultiPoly:
    nvars = nvars or int(ctx.rng.integers(1, 4))
    degree = degree or int(ctx.rng.integers(1, 4))
    return C.random_stable(nvars, degree, ctx.rng, recipe, real).poly


def _nonzero_derivative(f: MultiPoly, ctx: Ctx) -> tuple[int, MultiPoly]:
    order = ctx.rng.permutation(f.nvars)
    for j in order:
        d = partial_derivative(f, int(j))
        if not d.is_zero():
            return int(j), d
    raise Skip("constant polynomial")


def _h_partner(f: MultiPoly, ctx: Ctx) -> MultiPoly:
    """g with f <-H g: a positive combination of a partial derivative and f."""
    _, d = _nonzero_derivative(f, ctx)
    return d.scale(float(ctx.rng.uniform(0.2, 2.0))) + f.scale(float(ctx.rng.uniform(0.0, 1.0)))


def _ppos_multi(ctx: Ctx, nvars: int | None = None, degree: int | None = None) -> MultiPoly:
    nvars = nvars or int(ctx.rng.integers(1, 3))
    degree = degree or int(ctx.rng.integers(1, 4))
    return C.random_ppos(nvars, degree, ctx.rng)


def _ppos1(ctx: Ctx, degree: int | None = None) -> UniPoly:
    return C.random_ppos1(degree or int(ctx.rng.integers(1, 6)), ctx.rng)


def _p_pair(ctx: Ctx) -> tuple[MultiPoly, MultiPoly]:
    """f <-P g: root-interlacing univariate pairs, or h with a combination of its derivative."""
    if ctx.rng.uniform() < 0.5:
        f = _ppos1(ctx)
        roots = np.sort(all_roots(f).roots.real)
        g = C.interlacing_partner(roots, ctx.rng, same_degree=bool(ctx.rng.uniform() < 0.5), lead=f.lead.real)
        return f.to_multi(), g.to_multi()
    h = _ppos_multi(ctx, nvars=2)
    return h, _h_partner(h, ctx)


def _common_pair(ctx: Ctx) -> tuple[MultiPoly, MultiPoly]:
    """f, g with a common h <-P f and h <-P g."""
    if ctx.rng.uniform() < 0.5:
        h = _ppos1(ctx)
        roots = np.sort(all_roots(h).roots.real)
        f = C.interlacing_partner(roots, ctx.rng, same_degree=bool(ctx.rng.uniform() < 0.5))
        g = C.interlacing_partner(roots, ctx.rng, same_degree=bool(ctx.rng.uniform() < 0.5))
        return f.to_multi(), g.to_multi()
    h = _ppos_multi(ctx, nvars=2)
    return _h_partner(h, ctx), _h_partner(h, ctx)


def _hsim_pair(ctx: Ctx) -> tuple[MultiPoly, MultiPoly]:
    """Real f ~H g: an <-H pair, or slices two apart of a positive stable polynomial."""
    if ctx.rng.uniform() < 0.5:
        f = _stable(ctx, real=True)
        return f, _h_partner(f, ctx)
    F = _stable(ctx, real=True, nvars=int(ctx.rng.integers(2, 4)), degree=int(ctx.rng.integers(2, 4)))
    j = int(ctx.rng.integers(F.nvars))
    s = coefficient_slices(F, j)
    ks = [k for k in range(len(s) - 2) if not (s[k].is_zero() or s[k + 2].is_zero())]
    if not ks:
        raise Skip("no pair of nonzero slices two apart")
    k = ks[int(ctx.rng.integers(len(ks)))]
    return s[k], s[k + 2]


def _unstable_factor(nvars: int, ctx: Ctx, real: bool) -> tuple[MultiPoly, int, complex]:
    """x_j - c with Re c > 0."""
    j = int(ctx.rng.integers(nvars))
    c = float(ctx.rng.uniform(0.2, 2.0)) if real else complex(ctx.rng.uniform(0.2, 2.0), ctx.rng.uniform(-2, 2))
    return MultiPoly.variable(j, nvars) - MultiPoly.constant(c, nvars), j, c


# -- outcome helpers ------------------------------------------------------------------------


def _must_be_stable(p: MultiPoly, ctx: Ctx, what: str, allow_zero: bool = True, context=None):
    if p.is_zero():
        return None if allow_zero else Refutation(p, None, f"{what}: zero polynomial", context or {})
    v = decide(p, ctx.cfg)
    if isinstance(v, Unstable):
        return Refutation(p, v.witness, f"{what}: {v.reason}", context or {})
    return None


def _must_be_hurwitz(p: UniPoly, what: str, tol: float = 1e-9, context=None):
    if p.is_zero() or p.degree <= 0:
        return None
    v = hurwitz_verdict(p, tol)
    if not v.stable:
        return Refutation(p.to_multi(), (v.worst_root,), f"{what}: root with real part {v.worst_root.real:.3e}", context or {})
    return None


def _offending(f: MultiPoly, g: MultiPoly, rel: Relation, witness) -> MultiPoly:
    if isinstance(witness, dict) and isinstance(witness.get("r"), float):
        return f + g.scale(witness["r"])
    return join_with_fresh_var(f, g)


def _must_relate(f: MultiPoly, g: MultiPoly, rel: Relation, ctx: Ctx, what: str):
    v = check_relation(f, g, rel, ctx.cfg)
    if v.holds != "no":
        return None
    ctx_info = {"f": f.to_json(), "g": g.to_json(), "relation": rel.value, "method": v.method}
    return Refutation(_offending(f, g, rel, v.witness), v.witness, f"{what}: {v.detail}", ctx_info)


def _first(*outcomes):
    for o in outcomes:
        if o is not None:
            return o
    return None


# -- closure operations -------------------------------------------------------------------


def _le_1a(ctx):
    f = _stable(ctx)
    alpha = complex(ctx.rng.normal(), ctx.rng.normal())
    return _must_be_stable(f.scale(alpha), ctx, "nonzero multiple")


def _le_1b(ctx):
    f = _stable(ctx)
    rules = tuple(Scale(float(a)) for a in ctx.rng.uniform(0.1, 5.0, f.nvars))
    return _must_be_stable(affine_substitute(f, AffineSubstitution(rules)), ctx, "positive rescaling")


def _le_1c(ctx):
    f = _stable(ctx)
    rules = tuple(Shift(complex(ctx.rng.uniform(0.01, 2.0), ctx.rng.uniform(-3, 3))) for _ in range(f.nvars))
    return _must_be_stable(affine_substitute(f, AffineSubstitution(rules)), ctx, "shift by RHP point")


def _le_1d(ctx):
    f = _stable(ctx, nvars=int(ctx.rng.integers(2, 4)))
    sigma = complex(ctx.rng.uniform(0.01, 3.0), ctx.rng.uniform(-3, 3))
    rules = (FixValue(sigma),) + (Keep(),) * (f.nvars - 1)
    return _must_be_stable(affine_substitute(f, AffineSubstitution(rules)), ctx, "fix first variable in RHP", allow_zero=False)


def _le_1e(ctx):
    f = _stable(ctx)
    rules = (SplitSum(),) + (Keep(),) * (f.nvars - 1)
    return _must_be_stable(affine_substitute(f, AffineSubstitution(rules)), ctx, "x1 -> x1 + y")


def _le_1f(ctx):
    f = _stable(ctx, nvars=int(ctx.rng.integers(2, 4)))
    rules = (Keep(), RenameTo(0)) + (Keep(),) * (f.nvars - 2)
    return _must_be_stable(affine_substitute(f, AffineSubstitution(rules)), ctx, "x2 -> x1", allow_zero=False)


def _le_2(ctx):
    f = _stable(ctx, nvars=int(ctx.rng.integers(2, 4)))
    a = float(ctx.rng.uniform(-3, 3))
    rules = (FixImaginary(a),) + (Keep(),) * (f.nvars - 1)
    return _must_be_stable(affine_substitute(f, AffineSubstitution(rules)), ctx, "fix first variable on imaginary axis")


def _le_3(ctx):
    f = _stable(ctx, nvars=int(ctx.rng.integers(1, 3)))
    g = _stable(ctx, nvars=f.nvars)
    out = _must_be_stable(f * g, ctx, "product of stable polynomials", allow_zero=False)
    if out is not None:
        return out
    # a planted unstable factor must make the product unstable
    u, j, c = _unstable_factor(f.nvars, ctx, real=False)
    v = decide(f * u, ctx.cfg)
    if not isinstance(v, Unstable):
        raise Skip("product with an unstable factor was not refuted")
    return None


def _le_4(ctx):
    f = _stable(ctx)
    j = int(ctx.rng.integers(f.nvars))
    return _must_be_stable(reverse_in_var(f, j), ctx, f"reversal in x{j + 1}", allow_zero=False)


def _le_5(ctx):
    f = _stable(ctx)
    j = int(ctx.rng.integers(f.nvars))
    return _must_be_stable(partial_derivative(f, j), ctx, f"derivative in x{j + 1}")


def _le_6(ctx):
    f = _stable(ctx, nvars=int(ctx.rng.integers(2, 4)))
    j = int(ctx.rng.integers(f.nvars))
    for k, s in enumerate(coefficient_slices(f, j)):
        out = _must_be_stable(s, ctx, f"coefficient of x{j + 1}^{k}")
        if out is not None:
            return out
    return None


# -- interlacing of stable polynomials ----------------------------------------------------


def _e2_1(ctx):
    F = _stable(ctx, nvars=int(ctx.rng.integers(2, 4)))
    j = int(ctx.rng.integers(F.nvars))
    s = coefficient_slices(F, j)
    for i in range(len(s) - 1):
        if s[i].is_zero() and s[i + 1].is_zero():
            continue
        if s[i].is_zero() or s[i + 1].is_zero():
            out = _must_be_stable(s[i] + s[i + 1], ctx, f"slice {i} or {i + 1}")
        else:
            out = _must_relate(s[i], s[i + 1], Relation.H, ctx, f"slices {i} <-H {i + 1}")
        if out is not None:
            return out
    return None


def _e2_2(ctx):
    f = _stable(ctx)
    j, d = _nonzero_derivative(f, ctx)
    return _must_relate(f, d, Relation.H, ctx, f"f <-H d/dx{j + 1} f")


def _e2_3(ctx):
    rule = "abcde"[ctx.trial % 5]
    f = _stable(ctx)
    if rule == "a":
        g = _h_partner(f, ctx)
        h = _stable(ctx, nvars=f.nvars)
        out = _must_relate(f * h, g * h, Relation.H, ctx, "fh <-H gh")
        if out is not None:
            return out
        u, _, _ = _unstable_factor(f.nvars, ctx, real=False)
        if check_relation(f * u, g * u, Relation.H, ctx.cfg).holds != "no":
            raise Skip("fh <-H gh with unstable h was not refuted")
        return None
    if rule == "b":
        g = _h_partner(f, ctx)
        return _must_relate(g, f, Relation.H, ctx, "symmetry")
    if rule == "c":
        return _must_relate(f, _h_partner(f, ctx) + _h_partner(f, ctx), Relation.H, ctx, "f <-H g + h")
    if rule == "d":
        g = f
        a, b = _h_partner(g, ctx), _h_partner(g, ctx)
        return _must_relate(a + b, g, Relation.H, ctx, "f + h <-H g")
    F = _stable(ctx, nvars=int(ctx.rng.integers(2, 4)), degree=int(ctx.rng.integers(2, 4)))
    j = int(ctx.rng.integers(F.nvars))
    s = coefficient_slices(F, j)
    if len(s) < 3 or s[1].is_zero() or (s[0] + s[2]).is_zero():
        raise Skip("chain too short")
    return _must_relate(s[0] + s[2], s[1], Relation.H, ctx, "f0 + f2 <-H f1")


def _e2_4(ctx):
    f = _stable(ctx, real=True)
    v = hermite_biehler_check(f, ctx.cfg)
    if v.holds == "no":
        fe, fo = even_odd_parts(f)
        return Refutation(join_with_fresh_var(fe, fo) if not (fe.is_zero() or fo.is_zero()) else f, v.witness, f"stable f but f_e <-H f_o fails: {v.detail}", {"f": f.to_json()})
    u, _, _ = _unstable_factor(f.nvars, ctx, real=True)
    g = f * u
    if hermite_biehler_check(g, ctx.cfg).holds != "no":
        raise Skip("unstable f but even/odd relation not refuted")
    return None


# -- homogeneous part, real coefficients, determinants ------------------------------------


def _homog_1(ctx):
    f = _stable(ctx)
    return _must_be_stable(top_homogeneous(f), ctx, "top homogeneous part", allow_zero=False)


def _homog_3(ctx):
    f = _stable(ctx)
    top = top_homogeneous(f)
    c = np.array(list(top.terms.values()))
    c = c[np.abs(c) > 1e-12 * np.max(np.abs(c))]
    u = c / np.abs(c)
    spread = float(np.max(np.abs(u - u[0])))
    if spread > 1e-8:
        return Refutation(top, None, f"coefficient arguments differ by {spread:.3e}", {"f": f.to_json()})
    return None


def _real_sign(ctx):
    f = _stable(ctx, real=True)
    c = np.array([complex(v).real for v in f.terms.values()])
    c = c[np.abs(c) > 1e-12 * np.max(np.abs(c))]
    if not (np.all(c > 0) or np.all(c < 0)):
        return Refutation(f, None, "real stable polynomial with mixed coefficient signs")
    return None


def _bilinear(ctx):
    a, b, c, d = ctx.rng.uniform(0.05, 5.0, 4)
    r = float(10 ** ctx.rng.uniform(-3, 1))
    s = float(ctx.rng.uniform(-5, 5))
    x = complex(r, s)
    y = -(a + b * x) / (c + d * x)
    closed = -(a * c + b * c * r + a * d * r + b * d * r * r + b * d * s * s) / ((c + d * r) ** 2 + d * d * s * s)
    f = MultiPoly(2, {(0, 0): a, (1, 0): b, (0, 1): c, (1, 1): d})
    resid = abs(evaluate(f, (x, y)))
    if abs(closed - y.real) > 1e-10 * max(abs(y.real), 1e-300) or resid > 1e-10 * (a + b * abs(x) + c * abs(y) + d * abs(x * y)):
        return Refutation(f, (x, y), f"closed form {closed!r} vs solved {y.real!r}")
    if not y.real < 0:
        return Refutation(f, (x, y), "zero with both coordinates in the RHP")
    return None


def _det_pencil(ctx):
    tail = C.TAIL_KINDS[ctx.trial % 3]
    spec = C.PencilSpec.random(int(ctx.rng.integers(1, 5)), int(ctx.rng.integers(1, 4)), tail, ctx.rng)
    p = C.det_pencil(spec).poly
    out = _must_be_stable(p, ctx, f"pencil with tail {tail}", allow_zero=False, context={"pencil": spec.to_json()})
    if out is not None or tail == "imagsym":
        return out
    c = np.array(list(p.terms.values()))
    if np.max(np.abs(c.imag)) > 0 or not (np.all(c.real > 0) or np.all(c.real < 0)):
        return Refutation(p, None, "real pencil with coefficients of mixed sign", {"pencil": spec.to_json()})
    return None


def ppos_counterexample_roots() -> np.ndarray:
    """Roots in x of x(x+3) + y(x+1)(x+2) at y = 1 + i."""
    y = 1 + 1j
    return all_roots(UniPoly([2 * y, 3 + 3 * y, 1 + y])).roots


def _ppos_counter(ctx):
    roots = ppos_counterexample_roots()
    f = MultiPoly(2, {(2, 0): 1, (1, 0): 3, (2, 1): 1, (1, 1): 3, (0, 1): 2})
    if not np.all(roots.real < 0) or not (np.sum(roots.imag > 0) == 1 and np.sum(roots.imag < 0) == 1):
        return Refutation(f, tuple(roots), "roots at y = 1+i are not in quadrants 2 and 3")
    fx, gx = MultiPoly(1, {(2,): 1, (1,): 3}), MultiPoly(1, {(2,): 1, (1,): 3, (0,): 2})
    if check_relation(fx, gx, Relation.P, ctx.cfg).holds != "no":
        return Refutation(f, None, "join reported in Ppos")
    return None


# -- analytic closure operators ------------------------------------------------------------


def _exy_2(ctx):
    d = int(ctx.rng.integers(1, 3))
    f = _stable(ctx, nvars=2 * d, degree=int(ctx.rng.integers(1, 4)))
    return _must_be_stable(exp_mixed(f), ctx, "exp(dx . dy) f", allow_zero=False)


def _exy_3(ctx):
    f = _stable(ctx)
    g = _stable(ctx, nvars=f.nvars)
    return _must_be_stable(apply_diffop(f, g), ctx, "f(d/dx) g")


def _fxd(ctx):
    d = int(ctx.rng.integers(1, 3))
    fsym = _stable(ctx, nvars=2 * d, degree=int(ctx.rng.integers(1, 3)))
    g = _stable(ctx, nvars=2 * d)
    return _must_be_stable(apply_mixed(fsym, g), ctx, "f(x, d/dy) g")


# -- positive interlacing ------------------------------------------------------------------


def _poslace_1(ctx):
    if ctx.trial % 2 == 0:
        f, g = _common_pair(ctx)
        return _must_relate(f, g, Relation.Psim, ctx, "common interlacer implies ~P")
    h = MultiPoly.constant(1.0, 2)
    for _ in range(int(ctx.rng.integers(1, 4))):
        a, b = ctx.rng.uniform(0.1, 3.0, 2)
        h = h * MultiPoly(2, {(0, 0): 1.0, (1, 0): float(a), (0, 1): float(b)})
    return _must_relate(partial_derivative(h, 0), partial_derivative(h, 1), Relation.Psim, ctx, "d/dx f ~P d/dy f")


def _sim_1(ctx):
    f, g = _hsim_pair(ctx)
    r, s = ctx.rng.uniform(0.1, 10, 2)
    return _must_relate(f.scale(float(r)), g.scale(float(s)), Relation.Hsim, ctx, "rf ~H sg")


def _sim_2(ctx):
    f, g = _hsim_pair(ctx)
    r = float(10 ** ctx.rng.uniform(-2, 2))
    return _must_relate(f + g.scale(r), g, Relation.Hsim, ctx, "f + rg ~H g")


def _sim_3(ctx):
    f, g = _hsim_pair(ctx)
    h = _stable(ctx, real=True, nvars=f.nvars) if f.nvars else MultiPoly.constant(float(ctx.rng.uniform(0.5, 2)), 0)
    return _must_relate(f * h, h * g, Relation.Hsim, ctx, "fh ~H hg")


def _sim_4(ctx):
    f, g = _hsim_pair(ctx)
    return _must_relate(g, f, Relation.Hsim, ctx, "symmetry")


def _sim_5(ctx):
    f, g = _common_pair(ctx)
    return _must_relate(f, g, Relation.Hsim, ctx, "~P implies ~H")


def _sim_6(ctx):
    f, g = MultiPoly(1, {(2,): 1.0}), MultiPoly.constant(1.0, 1)
    if check_relation(f, g, Relation.Hsim, ctx.cfg).holds == "no":
        return Refutation(f + g, None, "x^2 ~H 1 rejected")
    v = check_relation(f, g, Relation.Psim, ctx.cfg)
    if v.holds != "no" or v.witness is None:
        return Refutation(join_with_fresh_var(f, g), None, "x^2 ~P 1 not refuted with a witness")
    return None


def _sim_7(ctx):
    f, g = _p_pair(ctx)
    return _must_relate(f, g, Relation.Psim, ctx, "<-P implies ~P")


def _sim_8(ctx):
    f, g = MultiPoly(1, {(2,): 1.0, (1,): 3.0}), MultiPoly(1, {(2,): 1.0, (1,): 3.0, (0,): 2.0})
    if check_relation(f, g, Relation.Psim, ctx.cfg).holds == "no":
        return Refutation(f + g, None, "x(x+3) ~P (x+1)(x+2) rejected")
    if check_relation(f, g, Relation.P, ctx.cfg).holds != "no":
        return Refutation(join_with_fresh_var(f, g), None, "x(x+3) <-P (x+1)(x+2) not refuted")
    return None


def _sim_9(ctx):
    f = _stable(ctx, real=True)
    return _must_relate(f, _h_partner(f, ctx), Relation.Hsim, ctx, "<-H implies ~H")


def _sim_10(ctx):
    f, g = MultiPoly(1, {(2,): 1.0}), MultiPoly.constant(1.0, 1)
    if check_relation(f, g, Relation.Hsim, ctx.cfg).holds == "no":
        return Refutation(f + g, None, "x^2 ~H 1 rejected")
    v = check_relation(f, g, Relation.H, ctx.cfg)
    if v.holds != "no" or v.witness is None:
        return Refutation(join_with_fresh_var(f, g), None, "x^2 <-H 1 not refuted with a witness")
    return None


def _f11_1(ctx):
    F = _stable(ctx, real=True, nvars=int(ctx.rng.integers(2, 4)), degree=int(ctx.rng.integers(2, 4)))
    j = int(ctx.rng.integers(F.nvars))
    s = coefficient_slices(F, j)
    for k in range(len(s) - 2):
        a, b = s[k], s[k + 2]
        if a.is_zero() and b.is_zero():
            continue
        if a.is_zero() or b.is_zero():
            out = _must_be_stable(a + b, ctx, f"slice {k} or {k + 2}")
        else:
            out = _must_relate(a, b, Relation.Hsim, ctx, f"slices {k} ~H {k + 2}")
        if out is not None:
            return out
    return None


def _f11_2(ctx):
    F = _stable(ctx, real=True, nvars=int(ctx.rng.integers(3, 5)), degree=int(ctx.rng.integers(2, 4)))
    f = coefficient_slice(coefficient_slice(F, F.nvars - 1, 0), F.nvars - 2, 0)
    g = coefficient_slice(coefficient_slice(F, F.nvars - 1, 1), F.nvars - 2, 1)
    if f.is_zero() or g.is_zero():
        raise Skip("no yz term")
    return _must_relate(f, g, Relation.Hsim, ctx, "coefficients of 1 and yz")


def _f11_3(ctx):
    f = _stable(ctx, real=True)
    g = _h_partner(f, ctx)
    j = int(ctx.rng.integers(f.nvars))
    return _must_relate(f, MultiPoly.variable(j, f.nvars) * g, Relation.Hsim, ctx, f"f ~H x{j + 1} g")


def _f11_4(ctx):
    f = _stable(ctx, real=True, nvars=int(ctx.rng.integers(1, 3)))
    f1 = _stable(ctx, real=True, nvars=f.nvars)
    return _must_relate(f * f1, _h_partner(f, ctx) * _h_partner(f1, ctx), Relation.Hsim, ctx, "ff1 ~H gg1")


# -- one variable ---------------------------------------------------------------------------


def _uni_pair(ctx, kind: str) -> tuple[UniPoly, UniPoly]:
    """Positive pairs of the requested kind, mixed with perturbed ones that may fail."""
    planted = ctx.rng.uniform() < 0.5
    if kind == "P":
        f = _ppos1(ctx)
        roots = np.sort(all_roots(f).roots.real)
        g = C.interlacing_partner(roots, ctx.rng, same_degree=bool(ctx.rng.uniform() < 0.5))
        if not planted:
            g = C.random_ppos1(max(f.degree - int(ctx.rng.integers(0, 2)), 1), ctx.rng)
        return f, g
    if kind == "Psim":
        h = _ppos1(ctx)
        roots = np.sort(all_roots(h).roots.real)
        f = C.interlacing_partner(roots, ctx.rng, same_degree=bool(ctx.rng.uniform() < 0.5))
        g = C.interlacing_partner(roots, ctx.rng, same_degree=bool(ctx.rng.uniform() < 0.5))
        if not planted:
            g = C.random_ppos1(max(f.degree + int(ctx.rng.integers(-1, 2)), 1), ctx.rng)
        return f, g
    f = C.random_hurwitz_real(int(ctx.rng.integers(1, 6)), ctx.rng)
    if planted:
        g = f.deriv() * float(ctx.rng.uniform(0.2, 2)) + f * float(ctx.rng.uniform(0, 1))
    else:
        g = C.random_hurwitz_real(max(f.degree + int(ctx.rng.integers(-1, 2)), 1), ctx.rng)
    return f, g


def _ratio_vs(ctx, kind: str, rel: Relation):
    """Compare the first-quadrant ratio criterion with the exact univariate decision."""
    f, g = _uni_pair(ctx, kind)
    region = RATIO_TARGET[rel]
    ratio = ratio_region_check(f, g, region, seed=ctx.cfg.seed)
    v = check_relation(f, g, rel, ctx.cfg)
    exact = v.holds == "yes"
    if bool(ratio) == exact:
        return None
    if ratio:
        reason, witness = f"f/g maps Q1 into {region.value} but {rel.value} fails", v.witness
    else:
        reason, witness = f"{rel.value} holds but f/g(sigma) = {ratio.image:.6g} is outside {region.value}", ratio.sigma
    return Refutation(join_with_fresh_var(f.to_multi(), g.to_multi()), witness, reason,
                      {"f": f.to_multi().to_json(), "g": g.to_multi().to_json(), "region": region.value, "exact": v.to_json()})


def _psim_exact(f: UniPoly, g: UniPoly) -> bool:
    return abs(f.degree - g.degree) <= 1 and common_interlacer(f, g) is not None


def _onevar_1(ctx):
    return _ratio_vs(ctx, "H", Relation.Hsim)


def _onevar_2(ctx):
    return _ratio_vs(ctx, "H", Relation.H)


def _onevar_3(ctx):
    return _ratio_vs(ctx, "P", Relation.P)


def _onevar_4(ctx):
    return _ratio_vs(ctx, "Psim", Relation.Psim)


def _onevar_5(ctx):
    h = _ppos1(ctx)
    roots = np.sort(all_roots(h).roots.real)
    f = C.interlacing_partner(roots, ctx.rng, same_degree=bool(ctx.rng.uniform() < 0.5))
    g = C.interlacing_partner(roots, ctx.rng, same_degree=bool(ctx.rng.uniform() < 0.5))
    if not _psim_exact(f, g):
        raise Skip("constructed pair not ~P")
    return _must_relate(f.to_multi(), g.to_multi(), Relation.H, ctx, "~P implies <-H")


def _uni_p_pair(ctx) -> tuple[UniPoly, UniPoly]:
    f = _ppos1(ctx)
    roots = np.sort(all_roots(f).roots.real)
    g = C.interlacing_partner(roots, ctx.rng, same_degree=bool(ctx.rng.uniform() < 0.5), lead=f.lead.real)
    return f, g


def _pi_1(ctx):
    h = _ppos1(ctx)
    roots = np.sort(all_roots(h).roots.real)
    f = C.interlacing_partner(roots, ctx.rng, same_degree=True)
    parts = [C.interlacing_partner(roots, ctx.rng, same_degree=bool(ctx.rng.uniform() < 0.5)) for _ in range(int(ctx.rng.integers(2, 5)))]
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    return _must_relate(f.to_multi(), total.to_multi(), Relation.Psim, ctx, "f ~P sum of f_i")


def _pi_2(ctx):
    f, g = _ppos1(ctx), _ppos1(ctx)
    fr, gr = np.sort(all_roots(f).roots.real), np.sort(all_roots(g).roots.real)
    n = int(ctx.rng.integers(1, 4))
    total = UniPoly([])
    for _ in range(n):
        fi = C.interlacing_partner(fr, ctx.rng, same_degree=bool(ctx.rng.uniform() < 0.5))
        gi = C.interlacing_partner(gr, ctx.rng, same_degree=bool(ctx.rng.uniform() < 0.5))
        total = total + fi * gi
    return _must_relate((f * g).to_multi(), total.to_multi(), Relation.Hsim, ctx, "fg ~H sum f_i g_i")


def _pi_3(ctx):
    f, g = _uni_p_pair(ctx)
    return _must_be_hurwitz(C.wronskian(f, g), "f g' - f' g", context={"f": f.to_multi().to_json(), "g": g.to_multi().to_json()})


def bezout_pointwise_error(f: UniPoly, g: UniPoly, B: MultiPoly, rng, points: int = 20) -> float:
    worst = 0.0
    for _ in range(points):
        x, y = rng.normal(size=2) + 1j * rng.normal(size=2)
        direct = (f(x) * g(y) - f(y) * g(x)) / (x - y)
        got = evaluate(B, (x, y))
        worst = max(worst, abs(got - direct) / max(abs(direct), 1e-300))
    return worst


def _pi_4(ctx):
    f, g = _uni_p_pair(ctx)
    B = C.bezout(f, g)
    info = {"f": f.to_multi().to_json(), "g": g.to_multi().to_json()}
    err = bezout_pointwise_error(f, g, B, ctx.rng)
    if err > 1e-10:
        return Refutation(B, None, f"Bezoutian differs from its formula by {err:.3e}", info)
    out = _must_be_stable(B, ctx, "Bezoutian", allow_zero=False, context=info)
    if out is not None or ctx.trial % 4:
        return out
    fxy = f.to_multi().extend(1) * f.to_multi().extend(1).permute([1, 0])
    return _must_relate(fxy, B, Relation.Hsim, ctx, "f(x)f(y) ~H B")


CD_FAMILIES = (C.OrthoFamily.legendre, C.OrthoFamily.chebyshev_t, C.OrthoFamily.hermite_e)


def _christoffel(ctx):
    fam = CD_FAMILIES[ctx.trial % 3]()
    n = (ctx.trial // 3) % 9
    s, d = C.christoffel_darboux(fam, n)
    resid = float(np.max(np.abs(s.coeffs - d.coeffs)) / np.max(np.abs(s.coeffs)))
    if resid > 1e-8:
        return Refutation(s.to_multi(), None, f"{fam.name} n={n}: identity residual {resid:.3e}")
    return _must_be_hurwitz(s, f"{fam.name} n={n}: sum of squares")


def _final_1(ctx):
    F = _ppos_multi(ctx, nvars=2, degree=int(ctx.rng.integers(2, 5)))
    alpha = float((0.5, 1.0, 1.5)[ctx.trial % 3])
    lhs, rhs = C.alpha_two_det(F, 1, alpha)
    if lhs.is_zero() or rhs.is_zero():
        raise Skip("zero side")
    return _must_relate(lhs, rhs, Relation.Hsim, ctx, f"f0^2 ~H f1^2 - {alpha} f0 f2")


def _final_2(ctx):
    F = _ppos_multi(ctx, nvars=2, degree=int(ctx.rng.integers(2, 5)))
    k = int(ctx.rng.integers(0, max(F.degree_in(1) - 1, 1)))
    det = C.coeff_hankel_det(F, 1, 2, base=k)
    return _must_be_hurwitz(UniPoly.from_multi(det), f"f_{k} f_{k + 2} - f_{k + 1}^2", context={"F": F.to_json()})


def _final_3(ctx):
    spec = C.random_pencil_coeff_spec(int(ctx.rng.integers(1, 4)), ctx.rng)
    return _must_be_hurwitz(C.pencil_coeff_det(spec), "fk - gh", context={"pencil": spec.to_json()})


# -- open-question probes ---------------------------------------------------------------


def _q1_record(ctx) -> dict:
    if ctx.trial % 2 == 0:
        f, g = _uni_pair(ctx, "Psim")
    else:
        f, g = _uni_pair(ctx, "H")
    psim = check_relation(f.to_multi(), g.to_multi(), Relation.Psim, ctx.cfg).holds
    hsim = "yes" if hsim_root_locus(f, g)[0] else "no"
    try:
        h = common_interlacer(f, g)
        inter = "found" if h is not None else "none"
    except ValueError as e:
        inter = f"n/a ({e})"
    # "n/a" means the interlacer question does not apply (roots not all real)
    flagged = (psim != "no" or hsim == "yes") and inter == "none"
    return {"f": f.to_multi().to_json(), "g": g.to_multi().to_json(), "psim": psim, "hsim": hsim, "interlacer": inter, "flagged": flagged}


def _q2_record(ctx) -> dict:
    r = 1 + ctx.trial % 3
    F = C.random_ppos(3, 2 * r + int(ctx.rng.integers(0, 2)), ctx.rng)
    det = UniPoly.from_multi(C.coeff_hankel_det(F, (1, 2), r))
    if det.is_zero():
        verdict, margin = "zero", None
    elif det.degree <= 0:
        verdict, margin = "stable", None
    else:
        v = hurwitz_verdict(det)
        verdict, margin = ("stable" if v.stable else "unstable"), float(v.margin)
    return {"size": r, "F": F.to_json(), "det": det.to_multi().to_json(), "verdict": verdict, "margin": margin}


def probe_question(which: str, budget: int = 50, seed: int = 0) -> SuiteReport:
    """Run the Q1 or Q2 probe; records only, never fails."""
    which = which.lower()
    if which not in ("q1", "q2"):
        raise KeyError(f"unknown question {which!r}")
    return run_suite(f"{which}-probe", budget, seed)


# -- registry -----------------------------------------------------------------------------


def _s(id, claim, body, trials=CLOSURE_TRIALS, probe=False, mc=SUITE_MC):
    return Suite(id, claim, body, trials, probe, mc)


REGISTRY: dict[str, Suite] = {s.id: s for s in [
    _s("lots-elem-1a", "nonzero complex multiples of stable polynomials are stable", _le_1a),
    _s("lots-elem-1b", "positive rescaling of the variables preserves stability", _le_1b),
    _s("lots-elem-1c", "shifting each variable by a right-half-plane point preserves stability", _le_1c),
    _s("lots-elem-1d", "fixing a variable at a right-half-plane point preserves stability", _le_1d),
    _s("lots-elem-1e", "x1 -> x1 + y preserves stability", _le_1e),
    _s("lots-elem-1f", "identifying two variables preserves stability", _le_1f),
    _s("lots-elem-2", "fixing a variable on the imaginary axis gives a stable polynomial or zero", _le_2),
    _s("lots-elem-3", "products of stable polynomials are stable; an unstable factor makes the product unstable", _le_3),
    _s("lots-elem-4", "reversal in one variable preserves stability", _le_4),
    _s("lots-elem-5", "partial derivatives of stable polynomials are stable or zero", _le_5),
    _s("lots-elem-6", "coefficient slices of stable polynomials are stable or zero", _le_6),
    _s("elem2-1", "consecutive coefficient slices interlace: f_i <-H f_(i+1)", _e2_1),
    _s("elem2-2", "f <-H d/dx_i f for stable f", _e2_2),
    _s("elem2-3", "algebra of <-H: products, symmetry, sums (rule by trial index mod 5)", _e2_3),
    _s("elem2-4", "real f is stable exactly when its even part <-H its odd part", _e2_4),
    _s("homog-1", "the top homogeneous part of a stable polynomial is stable", _homog_1),
    _s("homog-3", "the top homogeneous part has coefficients of one argument", _homog_3),
    _s("real-sign", "real stable polynomials have coefficients of one sign", _real_sign, trials=100),
    _s("bilinear-2x2", "a + bx + cy + dxy with positive coefficients: closed-form Re(y) < 0 at every zero with Re x > 0", _bilinear, trials=100),
    _s("det-pencil", "det(I + sum x_i D_i + tail) is stable, single-signed for real tails", _det_pencil, trials=150, mc=1000),
    _s("ppos-counterexample", "x(x+3) + y(x+1)(x+2) at y = 1+i has roots in quadrants 2 and 3", _ppos_counter, trials=1),
    _s("exy-2", "exp(dx . dy) preserves stability in 2d variables", _exy_2, trials=CONSTRUCTION_TRIALS),
    _s("exy-3", "f(d/dx) g is stable or zero for stable f, g", _exy_3, trials=CONSTRUCTION_TRIALS),
    _s("fxD", "f(x, d/dy) maps stable polynomials to stable polynomials or zero when f is stable", _fxd, trials=CONSTRUCTION_TRIALS),
    _s("poslace-1", "a common <-P interlacer gives ~P; partial derivatives of Ppos members are ~P", _poslace_1, trials=CONSTRUCTION_TRIALS),
    _s("sim-table-1", "f ~H g implies rf ~H sg for r, s > 0", _sim_1, trials=CONSTRUCTION_TRIALS),
    _s("sim-table-2", "f ~H g implies f + rg ~H g", _sim_2, trials=CONSTRUCTION_TRIALS),
    _s("sim-table-3", "f ~H g implies fh ~H hg for positive stable h", _sim_3, trials=CONSTRUCTION_TRIALS),
    _s("sim-table-4", "~H is symmetric", _sim_4, trials=CONSTRUCTION_TRIALS),
    _s("sim-table-5", "~P implies ~H", _sim_5, trials=CONSTRUCTION_TRIALS),
    _s("sim-table-6", "~H does not imply ~P: x^2 and 1", _sim_6, trials=1),
    _s("sim-table-7", "<-P implies ~P", _sim_7, trials=CONSTRUCTION_TRIALS),
    _s("sim-table-8", "~P does not imply <-P: x(x+3) and (x+1)(x+2)", _sim_8, trials=1),
    _s("sim-table-9", "<-H implies ~H", _sim_9, trials=CONSTRUCTION_TRIALS),
    _s("sim-table-10", "~H does not imply <-H: x^2 and 1", _sim_10, trials=1),
    _s("fact11-1", "slices two apart of a positive stable polynomial are ~H", _f11_1, trials=CONSTRUCTION_TRIALS),
    _s("fact11-2", "the coefficients of 1 and yz are ~H", _f11_2, trials=CONSTRUCTION_TRIALS),
    _s("fact11-3", "f <-H g implies f ~H x g", _f11_3, trials=CONSTRUCTION_TRIALS),
    _s("fact11-4", "f <-H g and f1 <-H g1 imply f f1 ~H g g1", _f11_4, trials=CONSTRUCTION_TRIALS),
    _s("onevar-1", "~H iff f/g maps Q1 into the slit plane", _onevar_1, trials=100),
    _s("onevar-2", "<-H iff f/g maps Q1 into the closed right half plane", _onevar_2, trials=100),
    _s("onevar-3", "<-P iff f/g maps Q1 into Q1", _onevar_3, trials=100),
    _s("onevar-4", "~P iff f/g maps Q1 into the open right half plane", _onevar_4, trials=100),
    _s("onevar-5", "~P implies <-H", _onevar_5, trials=100),
    _s("posinterlace-1", "f ~P f_i for each i implies f ~P sum f_i", _pi_1, trials=CONSTRUCTION_TRIALS),
    _s("posinterlace-2", "f <-P f_i and g <-P g_i imply fg ~H sum f_i g_i", _pi_2, trials=CONSTRUCTION_TRIALS),
    _s("posinterlace-3", "f <-P g implies f'g - fg' is stable", _pi_3, trials=100),
    _s("posinterlace-4", "f <-P g implies the Bezoutian is stable and f(x)f(y) ~H B", _pi_4, trials=100),
    _s("christoffel", "Christoffel-Darboux identity holds and the sum of squares is stable", _christoffel, trials=27),
    _s("final-2x2-1", "f0^2 ~H f1^2 - alpha f0 f2 for Ppos_2 slices and 0 < alpha < 2", _final_1, trials=CONSTRUCTION_TRIALS),
    _s("final-2x2-2", "f_k f_(k+2) - f_(k+1)^2 is stable for Ppos_2 slices", _final_2, trials=CONSTRUCTION_TRIALS),
    _s("final-2x2-3", "fk - gh from a diagonal/positive pencil is stable", _final_3, trials=CONSTRUCTION_TRIALS),
    _s("q1-probe", "open: do ~P or ~H pairs have a common interlacer?", _q1_record, trials=CONSTRUCTION_TRIALS, probe=True),
    _s("q2-probe", "open: is the (r+1)x(r+1) double-slice determinant of a Ppos_3 member stable?", _q2_record, trials=CONSTRUCTION_TRIALS, probe=True),
]}

FACT_SUITES = [k for k, s in REGISTRY.items() if not s.probe]


def _trial_seed(seed: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, trial]).generate_state(1)[0])


def run_suite(suite_id: str, trials: int | None = None, seed: int = 0, mc: int | None = None) -> SuiteReport:
    """Run one registered suite; deterministic in (suite_id, trials, seed)."""
    if suite_id not in REGISTRY:
        raise KeyError(f"unknown suite {suite_id!r}")
    suite = REGISTRY[suite_id]
    trials = suite.trials if trials is None else int(trials)
    start = time.perf_counter()
    passes, skips, refutations, records = 0, 0, [], []
    for t in range(trials):
        ts = _trial_seed(seed, t)
        ctx = Ctx(np.random.default_rng(ts), SamplerConfig(trials=mc or suite.mc, seed=ts), t)
        try:
            out = suite.body(ctx)
        except Skip:
            skips += 1
            continue
        if suite.probe:
            records.append({"trial": t, **jsonable(out)} if isinstance(out, dict) else {"trial": t})
            passes += 1
        elif out is None:
            passes += 1
        else:
            refutations.append(out.to_json(t))
    ms = round((time.perf_counter() - start) * 1000, 1)
    return SuiteReport(suite_id, trials, passes, refutations, skips, seed, ms, records, suite.probe)


class CorpusError(ValueError):
    """A corpus file could not be read as a suite report."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = str(path)
        self.message = message

    def to_json(self) -> dict:
        return {"error": "corpus", "path": self.path, "message": self.message}


def corpus_save(report: SuiteReport, path) -> None:
    Path(path).write_text(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")


def corpus_load(path) -> SuiteReport:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise CorpusError(path, f"invalid JSON at line {e.lineno} column {e.colno}") from None
    if not isinstance(data, dict):
        raise CorpusError(path, "top level is not an object")
    try:
        return SuiteReport.from_json(data)
    except (KeyError, TypeError, ValueError) as e:
        raise CorpusError(path, f"missing or malformed field: {e}") from None
