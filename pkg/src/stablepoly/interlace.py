"""Interlacing relations between stable polynomials.

Five relations are supported: f + y g stable (``H``), upper (``U``) or in
Ppos (``P``) for a fresh variable y, and f + r g in the positive stable
class (``Hsim``) or in Ppos (``Psim``) for every r > 0.  Univariate real
inputs are decided exactly where possible: through the image of the
imaginary axis under f/g, or by root order for pairs in Ppos_1.  Ratio maps of
the first quadrant serve as quick refutations.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .polycore import MultiPoly, Rotation, UniPoly, as_unipoly, coefficient_slices, even_odd_parts, rotate_halfplane
from .stability import (
    SamplerConfig,
    Unstable,
    decide,
    decide_many,
    decide_upper,
    in_ppos,
    join_with_fresh_var,
)
from .uniroots import all_roots, common_interlacer, hurwitz_verdict, in_ppos1, p_interlaces

BOUNDARY_TOL = 1e-10
POLE_EXCLUSION = 1e-8
R_RANGE = (1e-3, 1e3)
R_GRID = 32
R_RANDOM = 8


class Relation(str, enum.Enum):
    H = "H"
    U = "U"
    P = "P"
    Hsim = "Hsim"
    Psim = "Psim"


class Region(str, enum.Enum):
    SlitPlane = "SlitPlane"
    ClosedRHP = "ClosedRHP"
    Quadrant1 = "Quadrant1"
    OpenRHP = "OpenRHP"


RATIO_TARGET = {
    Relation.Hsim: Region.SlitPlane,
    Relation.H: Region.ClosedRHP,
    Relation.P: Region.Quadrant1,
    Relation.Psim: Region.OpenRHP,
}


def jsonable(w):
    if w is None:
        return None
    if isinstance(w, dict):
        return {k: jsonable(v) for k, v in w.items()}
    if isinstance(w, (tuple, list, np.ndarray)):
        return [jsonable(v) for v in w]
    if isinstance(w, (complex, np.complexfloating)):
        return {"re": float(w.real), "im": float(w.imag)}
    if isinstance(w, (bool, np.bool_)):
        return bool(w)
    if isinstance(w, (int, np.integer)):
        return int(w)
    if isinstance(w, (float, np.floating)):
        return float(w)
    if isinstance(w, str):
        return w
    return str(w)


@dataclass(frozen=True)
class RelationVerdict:
    """holds is "yes", "no" or "probably"; a "no" carries the violating input when one was found."""

    holds: str
    witness: object = None
    method: str = "join"
    detail: str = ""

    def __bool__(self) -> bool:
        return self.holds != "no"

    def to_json(self) -> dict:
        return {"holds": self.holds, "witness": jsonable(self.witness), "method": self.method, "detail": self.detail}


@dataclass(frozen=True)
class RatioResult:
    holds: bool
    sigma: complex | None = None
    image: complex | None = None

    def __bool__(self) -> bool:
        return self.holds


# -- ratio criteria -----------------------------------------------------------------


def _outside(w: np.ndarray, region: Region, tol: float) -> np.ndarray:
    mag = tol * np.abs(w)
    if region is Region.ClosedRHP:
        return w.real < -mag
    if region is Region.OpenRHP:
        return w.real <= mag
    if region is Region.Quadrant1:
        return (w.real < -mag) | (w.imag < -mag)
    return (w.real < -mag) & (np.abs(w.imag) <= mag)


def _slit_crossing(f: UniPoly, g: UniPoly, a: complex, b: complex, tol: float):
    """Bisect Im(f/g) = 0 on the segment a-b; return (sigma, w) if it lands on (-inf, 0)."""
    wa = f(a) / g(a)
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = (lo + hi) / 2
        s = a + mid * (b - a)
        wm = f(s) / g(s)
        if np.sign(wm.imag) == np.sign(wa.imag):
            lo = mid
        else:
            hi = mid
    s = a + (lo + hi) / 2 * (b - a)
    w = f(s) / g(s)
    if w.real < -tol * abs(w) and abs(w.imag) <= 1e-6 * abs(w):
        return complex(s), complex(w)
    return None


def ratio_region_check(f, g, region: Region | str, grid: int = 64, seed: int = 0, tol: float = BOUNDARY_TOL) -> RatioResult:
    """Sample f/g over the first quadrant and look for an image outside ``region``.

    The mesh is grid x grid log-polar points (angles in [0, pi/2), radii in
    [1e-3, 1e3]) plus ``grid`` random points; closed targets also get a dense
    sweep of both boundary rays.  Points within 1e-8 of a root
    of g are skipped.  For the slit plane, sign changes of Im(f/g) between
    mesh neighbours with negative real part are bisected, since a discrete
    mesh almost never lands on the slit itself.
    """
    f, g = as_unipoly(f), as_unipoly(g)
    region = Region(region)
    if g.is_zero():
        raise ValueError("g is identically zero")
    if f.is_zero():
        raise ValueError("f is identically zero")
    if not (f.is_real() and g.is_real()):
        raise ValueError("ratio criteria need real coefficients")
    rng = np.random.default_rng(seed)
    theta = np.linspace(0.0, np.pi / 2, grid, endpoint=False)
    radii = np.logspace(-3, 3, grid)
    mesh = radii[None, :] * np.exp(1j * theta[:, None])
    extra = 10 ** rng.uniform(-3, 3, grid) * np.exp(1j * rng.uniform(0, np.pi / 2, grid))
    g_roots = all_roots(g).roots if g.degree > 0 else np.zeros(0, complex)

    def image(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ok = np.ones(s.shape, bool)
        for r in g_roots:
            ok &= np.abs(s - r) > POLE_EXCLUSION
        gs = g(s)
        ok &= gs != 0
        w = np.where(ok, f(s) / np.where(ok, gs, 1.0), np.nan)
        return w, ok

    sweeps = [mesh, extra]
    if region in (Region.ClosedRHP, Region.Quadrant1):
        # closed targets extend to the boundary rays by continuity, and a
        # violation there is often a thin sliver the interior mesh misses
        rays = np.logspace(-3, 3, 16 * grid)
        sweeps.append(np.concatenate([rays.astype(complex), 1j * rays]))
    for pts in sweeps:
        w, ok = image(pts)
        bad = ok & _outside(np.nan_to_num(w), region, tol)
        if np.any(bad):
            idx = np.argwhere(bad)[0]
            return RatioResult(False, complex(pts[tuple(idx)]), complex(w[tuple(idx)]))

    if region is Region.SlitPlane:
        w, ok = image(mesh)
        for axis in (0, 1):
            w1 = np.moveaxis(w, axis, 0)
            p1 = np.moveaxis(mesh, axis, 0)
            o1 = np.moveaxis(ok, axis, 0)
            a, b = w1[:-1], w1[1:]
            cand = (
                o1[:-1] & o1[1:]
                & (np.sign(a.imag) * np.sign(b.imag) < 0)
                & ((a.real < 0) | (b.real < 0))
            )
            for idx in np.argwhere(cand):
                i = tuple(idx)
                j = (idx[0] + 1,) + tuple(idx[1:])
                hit = _slit_crossing(f, g, complex(p1[i]), complex(p1[j]), tol)
                if hit is not None:
                    return RatioResult(False, *hit)
    return RatioResult(True)


# -- relation checks ------------------------------------------------------------------


def _prep(f, g) -> tuple[MultiPoly, MultiPoly]:
    f = f.to_multi() if isinstance(f, UniPoly) else f
    g = g.to_multi() if isinstance(g, UniPoly) else g
    if f.nvars != g.nvars:
        raise ValueError(f"dimension mismatch: {f.nvars} vs {g.nvars} variables")
    if f.is_zero() or g.is_zero():
        raise ValueError("interlacing relations need nonzero polynomials")
    return f, g


def r_values(seed: int) -> np.ndarray:
    """32 log-spaced values in (1e-3, 1e3] plus a few seeded random ones."""
    rng = np.random.default_rng([seed, 7])
    fixed = np.logspace(-3, 3, R_GRID + 1)[1:]
    return np.concatenate([fixed, 10 ** rng.uniform(-3, 3, R_RANDOM)])


def _family_check(f: MultiPoly, g: MultiPoly, cfg: SamplerConfig, upper: bool) -> RelationVerdict:
    """f + r g in the positive stable class (and upper when ``upper``) for sampled r > 0.

    The endpoints f (r -> 0) and g (r -> infinity) are checked for plain
    stability: a limit of stable polynomials is stable or zero.
    """
    rs = r_values(cfg.seed)
    polys = [f + g.scale(float(r)) for r in rs]
    for k, p in enumerate(polys):
        if not p.is_zero() and not p.has_positive_coefficients():
            return RelationVerdict("no", {"r": float(rs[k])}, "join", "f + r g has a non-positive coefficient")
    checks = [(float(r), p) for r, p in zip(rs, polys)] + [("0+", f), ("inf", g)]
    stacks = [(False, [p for _, p in checks])]
    if upper:
        stacks.append((True, [rotate_halfplane(p, Rotation.UPPER_TO_STABLE) for _, p in checks]))
    for rotated, batch in stacks:
        verdicts = decide_many(batch, cfg)
        for (r, _), v in zip(checks, verdicts):
            if isinstance(v, Unstable):
                point = None if v.witness is None else tuple(1j * z for z in v.witness) if rotated else v.witness
                what = "upper" if rotated else "stable"
                return RelationVerdict("no", {"r": r, "point": point}, "join", f"not {what}: {v.reason}")
    return RelationVerdict("probably", None, "join")


def _join_check(f: MultiPoly, g: MultiPoly, rel: Relation, cfg: SamplerConfig) -> RelationVerdict:
    j = join_with_fresh_var(f, g)
    if rel is Relation.H:
        v = decide(j, cfg)
    elif rel is Relation.U:
        v = decide_upper(j, cfg)
    else:
        v = in_ppos(j, cfg)
    if isinstance(v, Unstable):
        return RelationVerdict("no", v.witness, "join", v.reason)
    return RelationVerdict("probably", None, "join")


def _scan_t(f: UniPoly, g: UniPoly):
    for t in np.logspace(-4, 4, 401):
        if not in_ppos1(f + g * float(t)):
            return float(t)
    return None


def _exact_ppos1(f: UniPoly, g: UniPoly, rel: Relation, cfg: SamplerConfig) -> RelationVerdict:
    if rel is Relation.P:
        if p_interlaces(f, g):
            return RelationVerdict("yes", None, "root_interlacing")
        r = ratio_region_check(f, g, Region.Quadrant1, seed=cfg.seed)
        if not r:
            return RelationVerdict("no", r.sigma, "root_interlacing", "roots out of order; ratio leaves Q1")
        v = _join_check(f.to_multi(), g.to_multi(), rel, cfg)
        return RelationVerdict("no", v.witness, "root_interlacing", "roots out of order")
    ok = abs(f.degree - g.degree) <= 1 and common_interlacer(f, g) is not None
    if ok:
        return RelationVerdict("yes", None, "root_interlacing")
    t = _scan_t(f, g)
    if t is not None:
        return RelationVerdict("no", {"r": t}, "root_interlacing", "f + r g leaves Ppos_1")
    r = ratio_region_check(f, g, Region.OpenRHP, seed=cfg.seed)
    return RelationVerdict("no", None if r else r.sigma, "root_interlacing", "no common interlacer")


def _axis_coeffs(f: UniPoly, g: UniPoly) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients in w of f(iw) and g(iw), padded to a common length."""
    fc, gc = f.coeffs.real, g.coeffs.real
    n = max(len(fc), len(gc))
    fc, gc = np.pad(fc, (0, n - len(fc))), np.pad(gc, (0, n - len(gc)))
    ipow = 1j ** np.arange(n)
    return fc * ipow, gc * ipow


def _real_points(p: np.ndarray) -> np.ndarray:
    """Sample points covering every sign interval of the real polynomial p."""
    if len(np.trim_zeros(p, "b")) <= 1:
        return np.array([0.0])
    rts = np.sort([w.real for w in all_roots(UniPoly(p)).roots if abs(w.imag) <= 1e-7 * (1 + abs(w))])
    if not len(rts):
        return np.array([0.0])
    span = 1 + np.max(np.abs(rts))
    return np.concatenate([[rts[0] - span], (rts[:-1] + rts[1:]) / 2, [rts[-1] + span], [0.0]])


def h_axis_check(f, g, tol: float = 1e-9) -> tuple[bool, tuple | None]:
    """Exact univariate test of f + y g stable, for real f and g.

    For y in the open right half plane the degree of f + y g cannot drop
    unless the leading ratio is negative, so its roots reach the right half
    plane only by crossing the imaginary axis at x = iw, which needs
    y = -f(iw)/g(iw) with positive real part.  The relation therefore holds
    iff f + g is stable and Re f(iw) conj g(iw) >= 0 for all real w.
    Returns (holds, (x, y)) with a zero of the join when it fails.
    """
    f, g = as_unipoly(f), as_unipoly(g)
    if not (f.is_real() and g.is_real()):
        raise ValueError("real coefficients required")
    F, G = _axis_coeffs(f, g)
    P = np.polynomial.polynomial.polymul(F, np.conj(G)).real
    for w in _real_points(P):
        Fw = np.polynomial.polynomial.polyval(w, F)
        Gw = np.polynomial.polynomial.polyval(w, G)
        if (Fw * np.conj(Gw)).real < -tol * abs(Fw) * abs(Gw):
            return False, _axis_witness(f, g, float(w))
    s = f + g
    if s.is_zero():
        return False, None
    v = hurwitz_verdict(s, tol)
    if not v.stable:
        return False, (complex(v.worst_root), 1.0 + 0j)
    return True, None


def _axis_witness(f: UniPoly, g: UniPoly, w: float) -> tuple | None:
    """A zero (x, y) of f + y g with both coordinates in the open right half plane near x = iw."""
    d = 1e-6 * (1 + abs(w))
    for _ in range(40):
        x = complex(d, w)
        gx = g(x)
        if gx != 0:
            y = -f(x) / gx
            if y.real > 0:
                return x, complex(y)
        d /= 2
    return None


def check_relation(f, g, rel: Relation | str, cfg: SamplerConfig | None = None) -> RelationVerdict:
    """Check one of the five interlacing relations between f and g.

    Univariate real pairs are decided exactly for H, Hsim, and for P and Psim
    when both lie in Ppos_1.  Everything else is refuted by ratio maps or
    sampled through the definition.
    """
    cfg = cfg or SamplerConfig()
    rel = Relation(rel)
    f, g = _prep(f, g)
    if f.nvars == 1 and f.is_real() and g.is_real():
        fu, gu = UniPoly.from_multi(f), UniPoly.from_multi(g)
        if rel in (Relation.P, Relation.Psim) and in_ppos1(fu) and in_ppos1(gu):
            return _exact_ppos1(fu, gu, rel, cfg)
        if rel is Relation.H:
            ok, wit = h_axis_check(fu, gu)
            if ok:
                return RelationVerdict("yes", None, "ratio_map", "f/g maps the imaginary axis into the closed right half plane")
            return RelationVerdict("no", wit, "ratio_map", "f + y g has a zero with x and y in the right half plane")
        if rel is Relation.Hsim:
            ok, r = hsim_root_locus(fu, gu)
            if ok:
                return RelationVerdict("yes", None, "ratio_map", "no imaginary-axis crossing for r > 0")
            return RelationVerdict("no", {"r": r}, "ratio_map", "f + r g leaves the positive stable class")
        if rel in RATIO_TARGET:
            r = ratio_region_check(fu, gu, RATIO_TARGET[rel], seed=cfg.seed)
            if not r:
                return RelationVerdict("no", r.sigma, "ratio_map", f"f/g = {r.image:.6g} outside {RATIO_TARGET[rel].value}")
    if rel is Relation.Hsim:
        return _family_check(f, g, cfg, upper=False)
    if rel is Relation.Psim:
        return _family_check(f, g, cfg, upper=True)
    return _join_check(f, g, rel, cfg)


# -- derived checks -------------------------------------------------------------------


def hermite_biehler_check(f: MultiPoly, cfg: SamplerConfig | None = None) -> RelationVerdict:
    """Stability of real f via f_e <-H f_o (even and odd parts by total degree).

    When one part vanishes the relation is degenerate and f is decided directly.
    """
    cfg = cfg or SamplerConfig()
    f = f.to_multi() if isinstance(f, UniPoly) else f
    if f.is_zero():
        raise ValueError("zero polynomial")
    if not f.is_real():
        raise ValueError("the even/odd criterion holds for real coefficients only")
    fe, fo = even_odd_parts(f)
    if fe.is_zero() or fo.is_zero():
        v = decide(f, cfg)
        if isinstance(v, Unstable):
            return RelationVerdict("no", v.witness, "direct", "degenerate even/odd split: " + v.reason)
        return RelationVerdict("probably", None, "direct", "degenerate even/odd split")
    return check_relation(fe, fo, Relation.H, cfg)


def _pair_verdict(a: MultiPoly, b: MultiPoly, rel: Relation, cfg: SamplerConfig) -> RelationVerdict:
    # zero slices: f + y 0 = f, and f + r 0 = f
    if a.is_zero() or b.is_zero():
        p = b if a.is_zero() else a
        v = decide(p, cfg)
        if rel is Relation.Hsim and not p.has_positive_coefficients():
            return RelationVerdict("no", None, "join", "non-positive coefficient")
        if isinstance(v, Unstable):
            return RelationVerdict("no", v.witness, "join", v.reason)
        return RelationVerdict("probably", None, "join")
    return check_relation(a, b, rel, cfg)


def coefficient_chain_check(F: MultiPoly, j: int, cfg: SamplerConfig | None = None) -> list[RelationVerdict]:
    """Slices f_0..f_n of F along x_j: f_i <-H f_{i+1} and f_k ~H f_{k+2}.

    Pairs of two zero slices are skipped.  Each verdict's ``detail`` names the pair.
    """
    cfg = cfg or SamplerConfig()
    slices = coefficient_slices(F, j)
    out = []
    for gap, rel in ((1, Relation.H), (2, Relation.Hsim)):
        for i in range(len(slices) - gap):
            a, b = slices[i], slices[i + gap]
            if a.is_zero() and b.is_zero():
                continue
            v = _pair_verdict(a, b, rel, cfg)
            out.append(RelationVerdict(v.holds, v.witness, v.method, f"{rel.value}({i},{i + gap}) {v.detail}".strip()))
    return out


def hsim_root_locus(f, g, tol: float = 1e-9) -> tuple[bool, float | None]:
    """Exact univariate test of f + r g in the positive stable class for all r > 0.

    Roots of f + r g can only cross the imaginary axis at r = -f(iw)/g(iw)
    with Im(f(iw) conj g(iw)) = 0, and coefficients change sign only at
    r = -f_k/g_k.  Between consecutive breakpoints membership is constant,
    so one representative per interval decides.  Returns (holds, violating r).
    """
    f, g = as_unipoly(f), as_unipoly(g)
    if not (f.is_real() and g.is_real()):
        raise ValueError("real coefficients required")
    fc, gc = f.coeffs.real, g.coeffs.real
    n = max(len(fc), len(gc))
    fc, gc = np.pad(fc, (0, n - len(fc))), np.pad(gc, (0, n - len(gc)))
    ipow = 1j ** np.arange(n)
    F, G = fc * ipow, gc * ipow
    cross = np.polynomial.polynomial.polymul(F, np.conj(G)).imag
    breaks = []
    if np.max(np.abs(cross)) > 1e-12 * max(np.max(np.abs(F)) * np.max(np.abs(G)), 1e-300):
        for w in all_roots(UniPoly(cross)).roots:
            if abs(w.imag) > 1e-7 * (1 + abs(w)):
                continue
            Fw = np.polynomial.polynomial.polyval(w.real, F)
            Gw = np.polynomial.polynomial.polyval(w.real, G)
            if abs(Gw) <= 1e-12 * max(abs(Fw), 1e-300):
                continue
            r = -Fw / Gw
            if r.real > 0 and abs(r.imag) <= 1e-7 * abs(r):
                breaks.append(r.real)
        dense = np.array([])
    else:
        # f/g is real on the whole imaginary axis: crossings for a continuum of r
        dense = np.logspace(-6, 6, 121)
    for a, b in zip(fc, gc):
        if b != 0 and -a / b > 0:
            breaks.append(-a / b)
    breaks = np.unique(np.array(breaks, dtype=float))
    if len(breaks):
        reps = np.concatenate([[breaks[0] / 10], np.sqrt(breaks[:-1] * breaks[1:]), [breaks[-1] * 10]])
    else:
        reps = np.array([1.0])
    for r in np.concatenate([reps, dense]):
        p = f + g * float(r)
        c = p.coeffs.real
        scale = np.max(np.abs(c)) if len(c) else 0.0
        if scale == 0:
            continue
        if np.any(c < -1e-12 * scale):
            return False, float(r)
        if p.degree > 0 and not hurwitz_verdict(p, tol).stable:
            return False, float(r)
    return True, None
