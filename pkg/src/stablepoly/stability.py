"""Semidecision for stability on products of open right half planes.

Verdicts are tri-state.  :func:`necessary_battery` applies cheap sound
refutations; :func:`refute_montecarlo` fixes all but one variable at random
right-half-plane values and looks for right-half-plane roots of the
restriction.  A certificate from :mod:`stablepoly.construct` short-circuits to
:class:`StableByCertificate` once the battery has passed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .polycore import (
    MultiPoly,
    Rotation,
    compose,
    evaluate,
    evaluate_many,
    evaluation_scale,
    rotate_halfplane,
    top_homogeneous,
)
from .uniroots import RootFindingError, UniPoly, all_roots, hurwitz_verdict, roots_batch, verdict_from_roots

WITNESS_RTOL = 1e-8
WITNESS_MARGIN = 1e-10
ARG_TOL = 1e-8
REAL_PART_FLOOR = 1e-2


@dataclass(frozen=True)
class SamplerConfig:
    """Monte-Carlo parameters.

    Real parts are drawn log-uniformly from (1e-2, radius], imaginary parts
    uniformly from [-radius, radius].  ``mode="line"`` restricts to lines
    ``i*a + t*dir`` with real ``a`` and positive ``dir`` instead of fixing
    all but one coordinate.
    """

    trials: int = 1000
    seed: int = 0
    radius: float = 4.0
    tol: float = 1e-9
    polish_steps: int = 50
    mode: str = "fix"
    max_redraws: int = 8

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.mode not in ("fix", "line"):
            raise ValueError(f"unknown restriction mode {self.mode!r}")

    def with_(self, **kw) -> "SamplerConfig":
        return SamplerConfig(**{**self.__dict__, **kw})


@dataclass(frozen=True)
class Unstable:
    witness: tuple | None
    value: complex | None
    reason: str = "witness"

    def to_json(self) -> dict:
        return {
            "verdict": "unstable",
            "reason": self.reason,
            "witness": None if self.witness is None else [[z.real, z.imag] for z in self.witness],
            "value": None if self.value is None else [self.value.real, self.value.imag],
        }


@dataclass(frozen=True)
class ProbablyStable:
    trials: int
    seed: int
    min_margin: float

    def to_json(self) -> dict:
        return {
            "verdict": "probably_stable",
            "trials": self.trials,
            "seed": self.seed,
            "min_margin": self.min_margin if math.isfinite(self.min_margin) else None,
        }


@dataclass(frozen=True)
class StableByCertificate:
    kind: str

    def to_json(self) -> dict:
        return {"verdict": "stable_by_certificate", "kind": self.kind}


StabilityVerdict = Union[Unstable, ProbablyStable, StableByCertificate]


def is_refuted(v: StabilityVerdict) -> bool:
    return isinstance(v, Unstable)


def verdict_from_json(data: dict) -> StabilityVerdict:
    kind = data["verdict"]
    if kind == "unstable":
        w = data.get("witness")
        val = data.get("value")
        return Unstable(
            None if w is None else tuple(complex(a, b) for a, b in w),
            None if val is None else complex(*val),
            data.get("reason", "witness"),
        )
    if kind == "probably_stable":
        m = data.get("min_margin")
        return ProbablyStable(data["trials"], data["seed"], float("inf") if m is None else m)
    if kind == "stable_by_certificate":
        return StableByCertificate(data["kind"])
    raise ValueError(f"unknown verdict {kind!r}")


def witness_ok(f: MultiPoly, witness: Sequence[complex], rtol: float = WITNESS_RTOL) -> bool:
    """Every coordinate clearly in the RHP and f numerically zero there.

    "Clearly" means Re z > WITNESS_MARGIN * max(1, |z|): a far-out root whose
    real part is roundoff-sized relative to |z| certifies nothing.
    """
    if witness is None or len(witness) != f.nvars:
        return False
    if any(complex(z).real <= WITNESS_MARGIN * max(1.0, abs(complex(z))) for z in witness):
        return False
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            val, scale = abs(evaluate(f, witness)), evaluation_scale(f, witness)
    except OverflowError:
        return False  # too far out to certify
    return bool(np.isfinite(scale)) and val < rtol * max(scale, 1e-300)


# -- necessary conditions -------------------------------------------------------


@dataclass(frozen=True)
class BatteryResult:
    passed: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.passed


def diagonal(f: MultiPoly) -> UniPoly:
    """f(x, x, ..., x)."""
    x = MultiPoly.variable(0, 1)
    return UniPoly.from_multi(compose(f, [x] * f.nvars)) if f.nvars else UniPoly([f.coeff(())])


def necessary_battery(f: MultiPoly, tol: float = 1e-9) -> BatteryResult:
    if f.is_zero():
        return BatteryResult(False, "zero polynomial")
    coefs = np.array(list(f.terms.values()))
    big = np.abs(coefs) > 1e-12 * np.max(np.abs(coefs))
    if f.is_real():
        re = coefs.real[big]
        if np.any(re > 0) and np.any(re < 0):
            return BatteryResult(False, "real coefficients of mixed sign")
    top = np.array(list(top_homogeneous(f).terms.values()))
    top = top[np.abs(top) > 1e-12 * np.max(np.abs(top))]
    ref = top[np.argmax(np.abs(top))]
    spread = np.abs(np.angle(top * np.conj(ref)))
    if np.max(spread) > ARG_TOL:
        return BatteryResult(False, f"top homogeneous coefficients differ in argument by {np.max(spread):.3g} rad")
    if f.nvars >= 1:
        diag = diagonal(f)
        if not diag.is_zero():
            try:
                hv = hurwitz_verdict(diag, tol)
            except RootFindingError:
                hv = None
            # real part judged relative to |z|: far-out roots carry roundoff of size eps |z|
            if hv is not None and not hv.stable and hv.worst_root.real > tol * max(1.0, abs(hv.worst_root)):
                return BatteryResult(False, f"diagonal restriction has root {hv.worst_root:.6g}")
    return BatteryResult(True)


# -- Monte-Carlo refutation --------------------------------------------------------


def sample_rhp(rng: np.random.Generator, shape, radius: float) -> np.ndarray:
    lo, hi = math.log(REAL_PART_FLOOR), math.log(radius)
    re = np.exp(rng.uniform(lo, hi, size=shape))
    im = rng.uniform(-radius, radius, size=shape)
    return re + 1j * im


def _restrict_fixed(exps, coefs, j, pts) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients in x_j (ascending) with the other coordinates at ``pts``; also term scales."""
    others = exps.copy()
    others[:, j] = 0
    mono = np.prod(pts[:, None, :] ** others[None, :, :], axis=2)
    w = mono * coefs[None, :]
    deg = int(exps[:, j].max())
    onehot = np.zeros((len(coefs), deg + 1))
    onehot[np.arange(len(coefs)), exps[:, j]] = 1.0
    scale = np.abs(mono) @ np.abs(coefs)
    return w @ onehot, scale


def _restrict_line(f: MultiPoly, bases, dirs) -> np.ndarray:
    """Coefficients of t -> f(base + t dir) by interpolation on the unit circle."""
    n = max(f.degree, 0) + 1
    nodes = np.exp(2j * np.pi * np.arange(n) / n)
    pts = bases[:, None, :] + nodes[None, :, None] * dirs[:, None, :]
    vals = evaluate_many(f, pts.reshape(-1, f.nvars)).reshape(len(bases), n)
    return np.fft.fft(vals, axis=1) / n


def _polish(row: np.ndarray, z: complex, steps: int) -> complex:
    """Damped Newton on the ascending coefficient row."""
    p = np.polynomial.polynomial
    drow = p.polyder(row)
    fz = p.polyval(z, row)
    for _ in range(steps):
        dz = p.polyval(z, drow)
        if dz == 0:
            break
        step = fz / dz
        lam = 1.0
        for _ in range(12):
            cand = z - lam * step
            fc = p.polyval(cand, row)
            if abs(fc) < abs(fz):
                break
            lam *= 0.5
        else:
            break
        z, fz = cand, fc
        if abs(step) <= 1e-16 * (1 + abs(z)):
            break
    return complex(z)


@dataclass
class _Trials:
    """Per-trial restriction data for one polynomial."""

    rows: list = field(default_factory=list)
    points: list = field(default_factory=list)
    free: list = field(default_factory=list)
    dirs: list = field(default_factory=list)


def _zero_poly_verdict(f: MultiPoly) -> Unstable:
    return Unstable(tuple([1 + 0j] * f.nvars), 0j, "zero polynomial")


def _univariate(f: MultiPoly, cfg: SamplerConfig) -> StabilityVerdict:
    row = np.array([f.coeff((k,)) for k in range(f.degree + 1)], dtype=complex)
    if f.degree < 1:
        return ProbablyStable(1, cfg.seed, float("inf"))
    roots = roots_batch(row, seed=cfg.seed)[0]
    hv = verdict_from_roots(roots, cfg.tol)
    if not hv.stable:
        for z in sorted(roots, key=lambda r: -r.real):
            if z.real <= cfg.tol:
                break
            w = _polish(row, z, cfg.polish_steps)
            if w.real > WITNESS_MARGIN and witness_ok(f, (w,)):
                return Unstable((w,), evaluate(f, (w,)))
    return ProbablyStable(1, cfg.seed, hv.margin)


def _collect(f: MultiPoly, cfg: SamplerConfig, free, pts, dirs) -> _Trials:
    exps, coefs = f.exponent_matrix()
    d = f.nvars
    tr = _Trials()
    tr.rows = [None] * cfg.trials
    tr.points = pts.copy()
    tr.free = free
    tr.dirs = dirs
    if cfg.mode == "line":
        rows = _restrict_line(f, pts, dirs)
        for t in range(cfg.trials):
            tr.rows[t] = rows[t]
        return tr
    redraw = np.random.default_rng([cfg.seed, 1])
    for j in range(d):
        idx = np.nonzero(free == j)[0]
        if len(idx) == 0:
            continue
        rows, scale = _restrict_fixed(exps, coefs, j, pts[idx])
        for k, t in enumerate(idx):
            tr.rows[t] = rows[k]
            if np.max(np.abs(rows[k])) <= 1e-14 * scale[k]:
                tr.rows[t] = None  # degenerate, handled in _resolve_degenerate
    for t in range(cfg.trials):
        if tr.rows[t] is None:
            _resolve_degenerate(f, cfg, tr, t, exps, coefs, redraw)
    return tr


def _resolve_degenerate(f, cfg, tr, t, exps, coefs, redraw) -> None:
    j = int(tr.free[t])
    for _ in range(cfg.max_redraws + 1):
        base = tr.points[t]
        if abs(evaluate(f, base)) == 0.0:
            tr.rows[t] = ("zero", tuple(complex(z) for z in base))
            return
        base = sample_rhp(redraw, (f.nvars,), cfg.radius)
        rows, scale = _restrict_fixed(exps, coefs, j, base[None, :])
        tr.points[t] = base
        if np.max(np.abs(rows[0])) > 1e-14 * scale[0]:
            tr.rows[t] = rows[0]
            return
    tr.rows[t] = ("skip", None)


def _draw(cfg: SamplerConfig, d: int):
    rng = np.random.default_rng(cfg.seed)
    free = rng.integers(0, d, size=cfg.trials)
    if cfg.mode == "line":
        base = 1j * rng.uniform(-cfg.radius, cfg.radius, size=(cfg.trials, d))
        lo, hi = math.log(REAL_PART_FLOOR), math.log(cfg.radius)
        dirs = np.exp(rng.uniform(lo, hi, size=(cfg.trials, d)))
        return free, base, dirs
    return free, sample_rhp(rng, (cfg.trials, d), cfg.radius), None


def _witness_point(tr: _Trials, t: int, z: complex, cfg: SamplerConfig) -> tuple:
    if cfg.mode == "line":
        return tuple(complex(b + z * dd) for b, dd in zip(tr.points[t], tr.dirs[t]))
    pt = [complex(v) for v in tr.points[t]]
    pt[int(tr.free[t])] = z
    return tuple(pt)


def refute_many(polys: Sequence[MultiPoly], cfg: SamplerConfig) -> list[StabilityVerdict]:
    """``[refute_montecarlo(p, cfg) for p in polys]`` with one batched root solve.

    All polynomials share the sample points drawn from ``cfg.seed``.
    """
    if not polys:
        return []
    d = polys[0].nvars
    if any(p.nvars != d for p in polys):
        raise ValueError("all polynomials must have the same number of variables")
    out: list[StabilityVerdict | None] = [None] * len(polys)
    if d <= 1:
        for i, p in enumerate(polys):
            if p.is_zero():
                out[i] = _zero_poly_verdict(p)
            elif d == 0:
                out[i] = StableByCertificate("nonzero_constant")
            else:
                out[i] = _univariate(p, cfg)
        return out

    free, pts, dirs = _draw(cfg, d)
    trials = {}
    flat, owner = [], []
    for i, p in enumerate(polys):
        if p.is_zero():
            out[i] = _zero_poly_verdict(p)
            continue
        tr = _collect(p, cfg, free, pts, dirs)
        trials[i] = tr
        for t, row in enumerate(tr.rows):
            if isinstance(row, np.ndarray):
                flat.append(row)
                owner.append((i, t))
    width = max((len(r) for r in flat), default=1)
    mat = np.zeros((len(flat), width), dtype=complex)
    for k, r in enumerate(flat):
        mat[k, : len(r)] = r
    roots = roots_batch(mat, seed=cfg.seed) if flat else []
    by_owner = {key: roots[k] for k, key in enumerate(owner)}

    for i, tr in trials.items():
        p = polys[i]
        min_margin = float("inf")
        verdict = None
        for t in range(cfg.trials):
            row = tr.rows[t]
            if isinstance(row, tuple):
                if row[0] == "zero" and witness_ok(p, row[1]):
                    verdict = Unstable(row[1], evaluate(p, row[1]))
                    break
                continue
            r = by_owner[(i, t)]
            hv = verdict_from_roots(r, cfg.tol)
            min_margin = min(min_margin, hv.margin)
            if hv.stable:
                continue
            for z in sorted(r, key=lambda v: -v.real):
                if z.real <= cfg.tol:
                    break
                zp = _polish(row, z, cfg.polish_steps)
                if zp.real <= WITNESS_MARGIN:
                    continue
                w = _witness_point(tr, t, zp, cfg)
                if witness_ok(p, w):
                    verdict = Unstable(w, evaluate(p, w))
                    break
            if verdict is not None:
                break
        out[i] = verdict if verdict is not None else ProbablyStable(cfg.trials, cfg.seed, min_margin)
    return out


def refute_montecarlo(f: MultiPoly, cfg: SamplerConfig | None = None) -> StabilityVerdict:
    return refute_many([f], cfg or SamplerConfig())[0]


def _diagonal_witness(f: MultiPoly, tol: float) -> tuple | None:
    """(t, ..., t) for the right-most root t of f(t, ..., t), if it is a zero in the RHP."""
    diag = diagonal(f)
    if f.nvars == 0 or diag.degree < 1:
        return None
    try:
        roots = all_roots(diag).roots
    except RootFindingError:
        return None
    for t in sorted(roots, key=lambda z: -z.real):
        if t.real <= tol * max(1.0, abs(t)):
            break
        w = (complex(t),) * f.nvars
        if witness_ok(f, w):
            return w
    return None


def decide(f: MultiPoly, cfg: SamplerConfig | None = None, certificate: str | None = None) -> StabilityVerdict:
    cfg = cfg or SamplerConfig()
    if f.is_zero():
        return _zero_poly_verdict(f)
    battery = necessary_battery(f, cfg.tol)
    if not battery:
        w = _diagonal_witness(f, cfg.tol)
        if w is not None:
            return Unstable(w, evaluate(f, w), battery.reason)
        v = refute_montecarlo(f, cfg)
        if isinstance(v, Unstable):
            return Unstable(v.witness, v.value, battery.reason)
        return Unstable(None, None, battery.reason)
    if certificate is not None:
        return StableByCertificate(certificate)
    return refute_montecarlo(f, cfg)


def decide_many(polys: Sequence[MultiPoly], cfg: SamplerConfig | None = None) -> list[StabilityVerdict]:
    """Batched :func:`decide` for polynomials in the same number of variables."""
    cfg = cfg or SamplerConfig()
    out: list[StabilityVerdict | None] = [None] * len(polys)
    pending = []
    for i, p in enumerate(polys):
        if p.is_zero():
            out[i] = _zero_poly_verdict(p)
            continue
        battery = necessary_battery(p, cfg.tol)
        if not battery:
            w = _diagonal_witness(p, cfg.tol)
            if w is not None:
                out[i] = Unstable(w, evaluate(p, w), battery.reason)
                continue
            out[i] = battery
        pending.append(i)
    mc = refute_many([polys[i] for i in pending], cfg)
    for i, v in zip(pending, mc):
        if isinstance(out[i], BatteryResult):
            reason = out[i].reason
            out[i] = Unstable(v.witness, v.value, reason) if isinstance(v, Unstable) else Unstable(None, None, reason)
        else:
            out[i] = v
    return out


def stable_or_zero(f: MultiPoly, cfg: SamplerConfig | None = None) -> bool:
    """True unless f is a nonzero polynomial refuted for stability."""
    return f.is_zero() or not is_refuted(decide(f, cfg))


# -- relatives ---------------------------------------------------------------------


def join_with_fresh_var(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """f + y g with y appended as the last variable."""
    if f.nvars != g.nvars:
        raise ValueError(f"dimension mismatch: {f.nvars} vs {g.nvars} variables")
    y = MultiPoly.variable(f.nvars, f.nvars + 1)
    return f.extend(1) + y * g.extend(1)


def decide_upper(f: MultiPoly, cfg: SamplerConfig | None = None) -> StabilityVerdict:
    """Upper half plane version of :func:`decide`; witnesses are mapped back to the UHP."""
    v = decide(rotate_halfplane(f, Rotation.UPPER_TO_STABLE), cfg)
    if isinstance(v, Unstable) and v.witness is not None:
        w = tuple(1j * z for z in v.witness)
        return Unstable(w, evaluate(f, w), v.reason)
    return v


def upper_witness_ok(f: MultiPoly, witness, rtol: float = WITNESS_RTOL) -> bool:
    if witness is None or any(complex(z).imag <= WITNESS_MARGIN * max(1.0, abs(complex(z))) for z in witness):
        return False
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            val, scale = abs(evaluate(f, witness)), evaluation_scale(f, witness)
    except OverflowError:
        return False
    return bool(np.isfinite(scale)) and val < rtol * max(scale, 1e-300)


def in_hstable_real(f: MultiPoly, cfg: SamplerConfig | None = None) -> StabilityVerdict:
    """Membership in the positive-coefficient stable class; sign failures become Unstable."""
    if f.is_zero():
        return _zero_poly_verdict(f)
    if not f.has_positive_coefficients():
        v = decide(f, cfg)
        if isinstance(v, Unstable):
            return v
        return Unstable(None, None, "coefficients not all positive")
    return decide(f, cfg)


def in_ppos(f: MultiPoly, cfg: SamplerConfig | None = None) -> StabilityVerdict:
    """Membership in Ppos: positive coefficients, stable and upper."""
    v = in_hstable_real(f, cfg)
    if isinstance(v, Unstable):
        return v
    u = decide_upper(f, cfg)
    if isinstance(u, Unstable):
        return Unstable(u.witness, u.value, "not upper: " + u.reason)
    return v
