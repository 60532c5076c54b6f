"""Univariate roots, Hurwitz verdicts and root-order interlacing.

Root finding is Aberth-Ehrlich simultaneous iteration, vectorized over a
batch of polynomials of equal degree so that thousands of restrictions can be
solved in one call.  Exact zero roots are split off before iterating.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .polycore import UniPoly, as_unipoly

log = logging.getLogger(__name__)

EPS = np.finfo(float).eps
# a root of multiplicity m is only resolved to about eps**(1/m); verdicts
# average clusters at this radius (a triple root spreads by ~2e-5)
CLUSTER_RTOL = 1e-4


class RootFindingError(RuntimeError):
    """Simultaneous iteration did not converge within the restart budget."""


class InterlacerPrecondition(ValueError):
    pass


@dataclass(frozen=True)
class RootSet:
    roots: np.ndarray
    residual: float

    def __len__(self) -> int:
        return len(self.roots)


@dataclass(frozen=True)
class HurwitzVerdict:
    stable: bool
    worst_root: complex | None
    margin: float


def _horner(a: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """p(z), p'(z) and sum |a_k| |z|^k for rows of ascending coefficients ``a``."""
    n = a.shape[1] - 1
    p = np.broadcast_to(a[:, n : n + 1], z.shape).astype(complex)
    dp = np.zeros_like(p)
    az = np.abs(z)
    s = np.broadcast_to(np.abs(a[:, n : n + 1]), z.shape).astype(float)
    for k in range(n - 1, -1, -1):
        dp = dp * z + p
        p = p * z + a[:, k : k + 1]
        s = s * az + np.abs(a[:, k : k + 1])
    return p, dp, s


def _initial_guess(a: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    b, n1 = a.shape
    n = n1 - 1
    # mean root modulus from |a0/an| = prod |roots|, clipped against the Cauchy bound
    geo = np.abs(a[:, 0] / a[:, -1]) ** (1.0 / n)
    cauchy = 1 + np.max(np.abs(a[:, :-1] / a[:, -1:]), axis=1)
    r = np.clip(geo, 1e-8, cauchy)
    offset = rng.uniform(0, 2 * np.pi, size=(b, 1))
    ang = offset + 2 * np.pi * np.arange(n)[None, :] / n + 0.4
    return r[:, None] * np.exp(1j * ang)


def _aberth(a: np.ndarray, rng: np.random.Generator, maxiter: int = 400, restarts: int = 3) -> np.ndarray:
    """Roots of each row of ``a`` (ascending, a[:, -1] != 0, a[:, 0] != 0)."""
    b, n1 = a.shape
    n = n1 - 1
    if n == 1:
        return (-a[:, 0] / a[:, 1])[:, None]
    a = a / a[:, -1:]
    z = _initial_guess(a, rng)
    done = np.zeros((b, n), dtype=bool)
    offdiag = ~np.eye(n, dtype=bool)
    for attempt in range(restarts + 1):
        for _ in range(maxiter):
            rows = np.nonzero(~done.all(axis=1))[0]
            if len(rows) == 0:
                return z
            zr = z[rows]
            p, dp, s = _horner(a[rows], zr)
            conv = np.abs(p) <= 8 * EPS * s
            with np.errstate(divide="ignore", invalid="ignore"):
                w = p / dp
                diff = zr[:, :, None] - zr[:, None, :]
                inv = np.where(offdiag, 1.0 / np.where(offdiag, diff, 1.0), 0.0)
                corr = w / (1.0 - w * inv.sum(axis=2))
            bad = ~np.isfinite(corr)
            if bad.any():
                corr[bad] = 1e-3 * (1 + np.abs(zr[bad])) * np.exp(2j * np.pi * rng.uniform(size=bad.sum()))
            tiny = np.abs(corr) <= 4 * EPS * np.abs(zr)
            conv |= tiny
            step = np.where(done[rows] | conv, 0, corr)
            z[rows] = zr - step
            done[rows] |= conv
        rows = np.nonzero(~done.all(axis=1))[0]
        if len(rows) == 0:
            return z
        log.debug("aberth restart %d for %d rows", attempt + 1, len(rows))
        jitter = 1e-3 * (1 + np.abs(z[rows])) * np.exp(2j * np.pi * rng.uniform(size=(len(rows), n)))
        z[rows] = z[rows] + jitter
        done[rows] = False
    raise RootFindingError(f"{len(np.nonzero(~done.all(axis=1))[0])} polynomials did not converge")


def _trim_rows(c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Effective degree and count of exact zero roots per row."""
    nz = c != 0
    any_nz = nz.any(axis=1)
    deg = np.where(any_nz, c.shape[1] - 1 - np.argmax(nz[:, ::-1], axis=1), -1)
    low = np.where(any_nz, np.argmax(nz, axis=1), 0)
    return deg, low


# rows whose root-modulus bound max_k |a_k/a_n|^(1/(n-k)) leaves
# [e^-LOG_SCALE_MAX, e^LOG_SCALE_MAX] are solved in w = z / bound, with the
# rescaled coefficients formed in log space so nothing overflows
LOG_SCALE_MAX = 30.0


def _balance(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rescale z = s w so that |b_k| <= |b_n| for all k; s = 1 for ordinary rows."""
    n = a.shape[1] - 1
    with np.errstate(divide="ignore"):
        la = np.log(np.abs(a))
    gap = (n - np.arange(n))[None, :]
    logs = np.max((la[:, :-1] - la[:, -1:]) / gap, axis=1)
    scale = np.ones(a.shape[0])
    wild = np.abs(logs) > LOG_SCALE_MAX
    if not wild.any():
        return a, scale
    a = a.copy()
    lb = la[wild] + np.arange(n + 1)[None, :] * logs[wild, None]
    lb -= lb[:, -1:]
    a[wild] = np.exp(lb) * np.exp(1j * np.angle(a[wild]))
    scale[wild] = np.exp(logs[wild])
    return a, scale


def roots_batch(coeffs: np.ndarray, seed: int = 0) -> list[np.ndarray]:
    """Roots of every row of an ascending coefficient array.

    Rows are grouped by (degree, number of zero roots) and each group is
    solved in one vectorized Aberth run.  Identically zero rows yield an
    empty array.
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim == 1:
        c = c[None, :]
    rng = np.random.default_rng(seed)
    deg, low = _trim_rows(c)
    out: list[np.ndarray] = [np.zeros(0, dtype=complex)] * c.shape[0]
    keys = deg * (c.shape[1] + 1) + low
    for key in np.unique(keys):
        rows = np.nonzero(keys == key)[0]
        d, lo = int(deg[rows[0]]), int(low[rows[0]])
        if d <= 0:
            continue
        zeros = np.zeros((len(rows), lo), dtype=complex)
        if d - lo > 0:
            a, scale = _balance(c[rows][:, lo : d + 1])
            z = _aberth(a, rng) * scale[:, None]
            z = np.concatenate([zeros, z], axis=1)
        else:
            z = zeros
        for i, r in enumerate(rows):
            out[r] = z[i]
    return out


def residual(p: UniPoly, roots: np.ndarray) -> float:
    """max over roots of |p(z)| / sum |c_k| |z|^k (a relative backward error)."""
    if len(roots) == 0:
        return 0.0
    val = np.abs(p(roots))
    scale = np.polynomial.polynomial.polyval(np.abs(roots), np.abs(p.coeffs))
    rel = np.divide(val, scale, out=np.zeros_like(val), where=scale > 0)
    return float(np.max(rel))


def all_roots(p, tol: float = 1e-9, seed: int = 0) -> RootSet:
    p = as_unipoly(p)
    if p.degree < 1:
        raise ValueError("all_roots needs degree >= 1")
    roots = roots_batch(p.coeffs, seed=seed)[0]
    res = residual(p, roots)
    if not res <= tol:
        raise RootFindingError(f"residual {res:.3e} above tolerance {tol:.1e}")
    return RootSet(roots, res)


def cluster_centers(roots: np.ndarray, rtol: float = CLUSTER_RTOL) -> np.ndarray:
    """Replace each root by the mean of its cluster (single linkage).

    A root of multiplicity m is perturbed by about eps**(1/m); the cluster
    mean is accurate to round-off, which keeps repeated imaginary-axis roots
    from looking unstable.
    """
    n = len(roots)
    if n < 2:
        return roots.copy()
    close = np.abs(roots[:, None] - roots[None, :]) <= rtol * (1 + np.abs(roots[:, None]))
    label = np.arange(n)
    changed = True
    while changed:
        new = np.min(np.where(close, label[None, :], n), axis=1)
        changed = not np.array_equal(new, label)
        label = new
    centers = roots.copy()
    for lab in np.unique(label):
        idx = label == lab
        centers[idx] = roots[idx].mean()
    return centers


def verdict_from_roots(roots: np.ndarray, tol: float = 1e-9) -> HurwitzVerdict:
    if len(roots) == 0:
        return HurwitzVerdict(True, None, float("inf"))
    centers = cluster_centers(roots)
    k = int(np.argmax(centers.real))
    worst = float(centers.real[k])
    return HurwitzVerdict(worst <= tol, complex(roots[k]), -worst)


def hurwitz_verdict(p, tol: float = 1e-9, seed: int = 0) -> HurwitzVerdict:
    """Stable iff no root has real part above ``tol`` (imaginary-axis roots allowed)."""
    p = as_unipoly(p)
    if p.is_zero():
        raise ValueError("the zero polynomial has no Hurwitz verdict")
    if p.degree == 0:
        return HurwitzVerdict(True, None, float("inf"))
    return verdict_from_roots(all_roots(p, seed=seed).roots, tol)


def routh_hurwitz_real(p) -> bool:
    """Strict Hurwitz test by the Routh table in exact rational arithmetic."""
    p = as_unipoly(p)
    if p.is_zero():
        raise ValueError("zero polynomial")
    if not p.is_real(rtol=0.0):
        raise ValueError("routh_hurwitz_real needs real coefficients")
    desc = [Fraction(float(c.real)) for c in p.coeffs[::-1]]
    if desc[0] == 0:
        raise ValueError("zero leading coefficient")
    n = len(desc) - 1
    if n == 0:
        return True
    rows = [desc[0::2], desc[1::2]]
    width = len(rows[0])
    rows = [r + [Fraction(0)] * (width - len(r)) for r in rows]
    first = [rows[0][0]]
    for _ in range(n):
        prev, cur = rows[-2], rows[-1]
        if cur[0] == 0:
            return False  # zero pivot: not strictly Hurwitz
        first.append(cur[0])
        nxt = [(cur[0] * prev[k + 1] - prev[0] * cur[k + 1]) / cur[0] for k in range(width - 1)]
        nxt.append(Fraction(0))
        rows.append(nxt)
        if len(first) == n + 1:
            break
    signs = [x > 0 for x in first]
    return all(signs) or not any(signs)


def real_rooted(p, tol: float = 1e-6, seed: int = 0) -> bool:
    p = as_unipoly(p)
    if p.is_zero():
        raise ValueError("zero polynomial")
    if p.degree == 0:
        return True
    r = all_roots(p, seed=seed).roots
    return bool(np.all(np.abs(r.imag) <= tol * (1 + np.abs(r))))


def sorted_real_roots(p, tol: float = 1e-6, seed: int = 0) -> np.ndarray | None:
    """Ascending real roots, or None when p is not real-rooted."""
    p = as_unipoly(p)
    if p.degree <= 0:
        return np.zeros(0)
    r = all_roots(p, seed=seed).roots
    if not np.all(np.abs(r.imag) <= tol * (1 + np.abs(r))):
        return None
    return np.sort(r.real)


def in_ppos1(p, tol: float = 1e-6, seed: int = 0) -> bool:
    """Real-rooted, no positive roots, positive coefficients."""
    p = as_unipoly(p)
    if p.is_zero():
        return False
    if not p.is_real():
        return False
    c = p.coeffs.real
    if np.any(c[np.abs(c) > 1e-12 * np.max(np.abs(c))] <= 0):
        return False
    r = sorted_real_roots(p, tol, seed)
    return r is not None and bool(np.all(r <= tol))


def _leq(a: float, b: float, tol: float) -> bool:
    return a <= b + tol * (1 + max(abs(a), abs(b)))


def roots_interlace(f_roots: np.ndarray, g_roots: np.ndarray, tol: float = 1e-9) -> bool:
    """Root order of f <-P g for ascending real roots.

    Equal degrees: g0 <= f0 <= g1 <= f1 <= ... <= g_{n-1} <= f_{n-1}.
    deg g = deg f - 1: f0 <= g0 <= f1 <= ... <= g_{n-2} <= f_{n-1}.
    """
    n, m = len(f_roots), len(g_roots)
    if m == n:
        merged = [x for pair in zip(g_roots, f_roots) for x in pair]
    elif m == n - 1:
        merged = [f_roots[0]] + [x for pair in zip(g_roots, f_roots[1:]) for x in pair]
    else:
        return False
    return all(_leq(merged[k], merged[k + 1], tol) for k in range(len(merged) - 1))


def p_interlaces(f, g, tol: float = 1e-6, seed: int = 0) -> bool:
    """Decide f <-P g (f + y g in Ppos_2) for univariate f, g by root order."""
    f, g = as_unipoly(f), as_unipoly(g)
    if not (in_ppos1(f, tol, seed) and in_ppos1(g, tol, seed)):
        return False
    fr = sorted_real_roots(f, tol, seed)
    gr = sorted_real_roots(g, tol, seed)
    return roots_interlace(fr, gr, tol=1e-9)


def common_interlacer(f, g, tol: float = 1e-6, seed: int = 0, samples: int = 33) -> UniPoly | None:
    """A polynomial h with h <-P f and h <-P g, or None.

    Returns None as soon as some sampled f + t g (t > 0) leaves Ppos_1.  The
    candidate is built from the merged sorted roots by taking every second
    entry and is verified by root order.
    """
    f, g = as_unipoly(f), as_unipoly(g)
    for name, p in (("f", f), ("g", g)):
        if p.is_zero() or not p.is_real() or p.lead.real <= 0:
            raise InterlacerPrecondition(f"{name} must be real with positive leading coefficient")
        if not in_ppos1(p, tol, seed):
            raise InterlacerPrecondition(f"{name} must be real-rooted with non-positive roots")
    if abs(f.degree - g.degree) > 1:
        raise InterlacerPrecondition("degrees must differ by at most one")
    for t in np.logspace(-3, 3, samples):
        if not in_ppos1(f + g * float(t), tol, seed):
            return None
    fr = sorted_real_roots(f, tol, seed)
    gr = sorted_real_roots(g, tol, seed)
    merged = np.sort(np.concatenate([fr, gr]))
    deg = max(f.degree, g.degree)
    for cand in (merged[1::2], merged[0::2]):
        if len(cand) != deg:
            continue
        cand = np.minimum(cand, 0.0)
        if roots_interlace(cand, fr, 1e-9) and roots_interlace(cand, gr, 1e-9):
            return UniPoly.from_roots(cand)
    return None
