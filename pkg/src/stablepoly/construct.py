"""Certified-stable constructions.

Determinantal pencils, Bezoutians and Wronskians of interlacing pairs,
Christoffel-Darboux sums, Hadamard and exponential transforms, coefficient
determinants, and the random generators the test suites draw from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .polycore import (
    MultiPoly,
    Scale,
    Shift,
    Keep,
    AffineSubstitution,
    UniPoly,
    affine_substitute,
    as_unipoly,
    coefficient_slice,
    partial_derivative,
    reverse_in_var,
)
from .uniroots import real_rooted

MAX_PENCIL = 12
MINORS_LIMIT = 8

TAIL_KINDS = ("none", "skew", "imagsym")


@dataclass(frozen=True)
class Certified:
    poly: MultiPoly
    kind: str


# -- pencils ------------------------------------------------------------------------


def random_pd(n: int, seed=None, positive: bool = False) -> np.ndarray:
    """M^T M + 1e-3 I with M uniform on [-1, 1] (or [0, 1] when ``positive``)."""
    rng = np.random.default_rng(seed)
    m = rng.uniform(0 if positive else -1, 1, size=(n, n))
    return m.T @ m + 1e-3 * np.eye(n)


def random_skew(n: int, seed=None) -> np.ndarray:
    m = np.random.default_rng(seed).uniform(-1, 1, size=(n, n))
    return (m - m.T) / 2


def random_sym(n: int, seed=None) -> np.ndarray:
    m = np.random.default_rng(seed).uniform(-1, 1, size=(n, n))
    return (m + m.T) / 2


@dataclass(frozen=True)
class PencilSpec:
    """det(I + sum x_i D_i + tail) with tail one of none, A (skew) or i*S (S symmetric)."""

    D: tuple
    tail_kind: str = "none"
    tail: np.ndarray | None = None

    def __post_init__(self):
        D = tuple(np.array(m, dtype=float) for m in self.D)
        object.__setattr__(self, "D", D)
        if not D:
            raise ValueError("at least one matrix D_i is required")
        n = D[0].shape[0]
        if n > MAX_PENCIL:
            raise ValueError(f"pencil size {n} exceeds the supported maximum {MAX_PENCIL}")
        for i, m in enumerate(D):
            if m.shape != (n, n):
                raise ValueError(f"D_{i + 1} has shape {m.shape}, expected {(n, n)}")
            if not np.array_equal(m, m.T):
                raise ValueError(f"D_{i + 1} is not symmetric")
            try:
                np.linalg.cholesky(m)
            except np.linalg.LinAlgError:
                raise ValueError(f"D_{i + 1} is not positive definite") from None
        if self.tail_kind not in TAIL_KINDS:
            raise ValueError(f"unknown tail kind {self.tail_kind!r}")
        if self.tail_kind == "none":
            object.__setattr__(self, "tail", None)
            return
        t = np.array(self.tail, dtype=float)
        if t.shape != (n, n):
            raise ValueError(f"tail has shape {t.shape}, expected {(n, n)}")
        if self.tail_kind == "skew" and not np.array_equal(t, -t.T):
            raise ValueError("tail A is not skew-symmetric")
        if self.tail_kind == "imagsym" and not np.array_equal(t, t.T):
            raise ValueError("tail S is not symmetric")
        object.__setattr__(self, "tail", t)

    @property
    def n(self) -> int:
        return self.D[0].shape[0]

    @property
    def d(self) -> int:
        return len(self.D)

    def constant_matrix(self) -> np.ndarray:
        base = np.eye(self.n, dtype=complex)
        if self.tail_kind == "skew":
            base = base + self.tail
        elif self.tail_kind == "imagsym":
            base = base + 1j * self.tail
        return base

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "D": [m.tolist() for m in self.D],
            "tail": {"kind": self.tail_kind, "M": None if self.tail is None else self.tail.tolist()},
        }

    @classmethod
    def from_json(cls, data: dict) -> "PencilSpec":
        tail = data.get("tail") or {"kind": "none"}
        spec = cls(tuple(np.array(m) for m in data["D"]), tail["kind"], tail.get("M"))
        if spec.n != data.get("n", spec.n) or spec.d != data.get("d", spec.d):
            raise ValueError("n/d fields disagree with the matrices")
        return spec

    @classmethod
    def random(cls, n: int, d: int, tail_kind: str = "none", seed=None, positive: bool = False) -> "PencilSpec":
        rng = np.random.default_rng(seed)
        D = tuple(random_pd(n, rng, positive) for _ in range(d))
        tail = None
        if tail_kind == "skew":
            tail = random_skew(n, rng)
        elif tail_kind == "imagsym":
            tail = random_sym(n, rng)
        return cls(D, tail_kind, tail)


def poly_det(entries: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    """Determinant of a square matrix of polynomials by memoized Laplace expansion."""
    n = len(entries)
    if n == 0:
        raise ValueError("empty matrix")
    nvars = entries[0][0].nvars

    @lru_cache(maxsize=None)
    def minor(row: int, cols: int) -> MultiPoly:
        if row == n:
            return MultiPoly.constant(1.0, nvars)
        total = MultiPoly.zero(nvars)
        sign = 1.0
        for c in range(n):
            if not cols >> c & 1:
                continue
            e = entries[row][c]
            if not e.is_zero():
                total = total + e.mul(minor(row + 1, cols & ~(1 << c))).scale(sign)
            sign = -sign
        return total

    return minor(0, (1 << n) - 1)


def _pencil_by_minors(spec: PencilSpec) -> MultiPoly:
    n, d = spec.n, spec.d
    base = spec.constant_matrix()
    entries = []
    for a in range(n):
        row = []
        for b in range(n):
            terms = {(0,) * d: base[a, b]}
            for i, m in enumerate(spec.D):
                e = [0] * d
                e[i] = 1
                terms[tuple(e)] = m[a, b]
            row.append(MultiPoly(d, terms))
        entries.append(row)
    return poly_det(entries)


def _pencil_by_interpolation(spec: PencilSpec) -> MultiPoly:
    n, d = spec.n, spec.d
    N = n + 1
    nodes = np.exp(2j * np.pi * np.arange(N) / N)
    grid = np.stack(np.meshgrid(*([nodes] * d), indexing="ij"), axis=-1).reshape(-1, d)
    mats = spec.constant_matrix()[None, :, :] + np.einsum("pi,ijk->pjk", grid, np.array(spec.D))
    vals = np.linalg.det(mats).reshape((N,) * d)
    coef = np.fft.fftn(vals) / N**d
    cut = 1e-12 * np.max(np.abs(coef))
    terms = {}
    for idx in np.argwhere(np.abs(coef) > cut):
        e = tuple(int(v) for v in idx)
        if sum(e) <= n:
            terms[e] = coef[tuple(idx)]
    return MultiPoly(d, terms)


def det_pencil(spec: PencilSpec) -> Certified:
    """Expanded det(I + sum x_i D_i + tail), certified stable by construction."""
    poly = _pencil_by_minors(spec) if spec.n <= MINORS_LIMIT else _pencil_by_interpolation(spec)
    if spec.tail_kind == "imagsym":
        return Certified(poly, "det_pencil_imag")
    # real pencil: strip the round-off imaginary parts
    poly = MultiPoly(poly.nvars, {e: c.real for e, c in poly.terms.items()})
    return Certified(poly, "det_pencil_skew")


# -- interlacing-pair constructions -----------------------------------------------------


def bezout(f, g, rtol: float = 1e-9) -> MultiPoly:
    """B(x, y) = (f(x) g(y) - f(y) g(x)) / (x - y), by synthetic division in x."""
    f, g = as_unipoly(f), as_unipoly(g)
    if f.degree < 1 and g.degree < 1:
        raise ValueError("bezout needs a non-constant polynomial")
    fx, gx = f.to_multi().extend(1), g.to_multi().extend(1)
    fy, gy = fx.permute([1, 0]), gx.permute([1, 0])
    num = fx * gy - fy * gx
    # numerator as a polynomial in x with coefficients in y
    n = max(num.degree_in(0), 0)
    coeffs = [coefficient_slice(num, 0, k).extend(1).permute([1, 0]) for k in range(n + 1)]
    y = MultiPoly.variable(1, 2)
    q = [MultiPoly.zero(2)] * n
    carry = MultiPoly.zero(2)
    for k in range(n, 0, -1):
        carry = coeffs[k] + y * carry
        q[k - 1] = carry
    remainder = coeffs[0] + y * carry
    if remainder.max_abs() > rtol * max(num.max_abs(), 1e-300):
        raise ArithmeticError(f"division by x - y left remainder {remainder.max_abs():.3e}")
    x = MultiPoly.variable(0, 2)
    out = MultiPoly.zero(2)
    xpow = MultiPoly.constant(1.0, 2)
    for k in range(n):
        out = out + q[k] * xpow
        xpow = xpow * x
    return out


def wronskian(f, g) -> UniPoly:
    """f g' - f' g."""
    f, g = as_unipoly(f), as_unipoly(g)
    w = (f * g.deriv() - f.deriv() * g).coeffs
    # for equal degrees the top term cancels; drop what is left of it
    keep = np.nonzero(np.abs(w) > 1e-13 * np.max(np.abs(w), initial=0.0))[0]
    return UniPoly(w[: keep[-1] + 1] if len(keep) else [])


def interlacing_partner(f_roots: Sequence[float], rng, same_degree: bool = False, lead: float = 1.0) -> UniPoly:
    """g = c f + sum a_i f/(x - r_i) with a_i >= 0 (and c > 0 when ``same_degree``).

    For f with non-positive roots r_i this gives f <-P g.
    """
    rng = np.random.default_rng(rng)
    f = UniPoly.from_roots(f_roots, lead)
    g = UniPoly([])
    for k, r in enumerate(f_roots):
        rest = list(f_roots[:k]) + list(f_roots[k + 1 :])
        g = g + UniPoly.from_roots(rest, lead) * float(rng.uniform(0.1, 2.0))
    if same_degree:
        g = g + f * float(rng.uniform(0.1, 2.0))
    return g


def random_ppos1(degree: int, rng, low: float = -5.0) -> UniPoly:
    """Real-rooted with roots in [low, 0) and positive leading coefficient."""
    rng = np.random.default_rng(rng)
    roots = np.sort(rng.uniform(low, -1e-2, size=degree))
    return UniPoly.from_roots(roots, float(rng.uniform(0.5, 2.0)))


def random_hurwitz_real(degree: int, rng) -> UniPoly:
    """Strictly stable real polynomial: product of x + a and x^2 + b x + c, a, b, c > 0."""
    rng = np.random.default_rng(rng)
    p = UniPoly([float(rng.uniform(0.5, 2.0))])
    left = degree
    while left > 0:
        if left >= 2 and rng.uniform() < 0.5:
            re = rng.uniform(0.05, 3.0)
            im = rng.uniform(0.1, 3.0)
            p = p * UniPoly([re * re + im * im, 2 * re, 1.0])
            left -= 2
        else:
            p = p * UniPoly([float(rng.uniform(0.05, 3.0)), 1.0])
            left -= 1
    return p


# -- orthogonal families ------------------------------------------------------------------


@dataclass(frozen=True)
class OrthoFamily:
    """f_{k+1} = (a_k x + b_k) f_k - c_k f_{k-1}, f_0 = 1, with a_k > 0 and c_k > 0.

    ``members`` returns the orthonormalized sequence: the relative norms follow
    from the recurrence as h_k / h_{k-1} = c_k a_{k-1} / a_k.
    """

    name: str
    recurrence: Callable[[int], tuple[float, float, float]] = field(compare=False)

    def raw(self, n: int) -> list[UniPoly]:
        polys = [UniPoly([1.0])]
        prev = UniPoly([])
        for k in range(n):
            a, b, c = self.recurrence(k)
            nxt = UniPoly([b, a]) * polys[-1] - (prev * c if k else UniPoly([]))
            prev = polys[-1]
            polys.append(nxt)
        return polys

    def norms(self, n: int) -> list[float]:
        h = [1.0]
        for k in range(1, n + 1):
            a_prev = self.recurrence(k - 1)[0]
            a, _, c = self.recurrence(k)
            if not (a > 0 and a_prev > 0 and c > 0):
                raise ValueError(f"recurrence coefficients at k={k} violate a_k > 0, c_k > 0")
            h.append(h[-1] * c * a_prev / a)
        return h

    def members(self, n: int) -> list[UniPoly]:
        return [p * (1.0 / math.sqrt(h)) for p, h in zip(self.raw(n), self.norms(n))]

    @classmethod
    def legendre(cls, shift: float = 1.0) -> "OrthoFamily":
        return cls(f"legendre(shift={shift})", lambda k: ((2 * k + 1) / (k + 1), (2 * k + 1) / (k + 1) * shift, k / (k + 1)))

    @classmethod
    def chebyshev_t(cls, shift: float = 1.0) -> "OrthoFamily":
        return cls(f"chebyshev_t(shift={shift})", lambda k: (1.0, shift, 1.0) if k == 0 else (2.0, 2.0 * shift, 1.0))

    @classmethod
    def hermite_e(cls, shift: float = 5.0) -> "OrthoFamily":
        return cls(f"hermite_e(shift={shift})", lambda k: (1.0, shift, float(k)))

    @classmethod
    def custom(cls, a: Sequence[float], b: Sequence[float], c: Sequence[float], name: str = "custom") -> "OrthoFamily":
        return cls(name, lambda k: (a[k], b[k], c[k]))


def christoffel_darboux(family: OrthoFamily, n: int) -> tuple[UniPoly, UniPoly]:
    """(sum_{i<=n} f_i^2, (k_n/k_{n+1}) (f_n f'_{n+1} - f'_n f_{n+1})) for the orthonormal family."""
    if n < 0:
        raise ValueError("n must be non-negative")
    f = family.members(n + 1)
    for k, p in enumerate(f):
        if p.degree >= 1 and not real_rooted(p):
            raise ValueError(f"member {k} of {family.name} is not real-rooted")
    total = UniPoly([])
    for p in f[: n + 1]:
        total = total + p * p
    ratio = f[n].lead / f[n + 1].lead
    det = (f[n] * f[n + 1].deriv() - f[n].deriv() * f[n + 1]) * ratio
    return total, det


# -- coefficientwise transforms -----------------------------------------------------------


def hadamard(f, g: MultiPoly, j: int = 0) -> MultiPoly:
    """sum a_i g_i x_j^i for f = sum a_i y^i and g = sum g_i x_j^i."""
    f = as_unipoly(f)
    if not 0 <= j < g.nvars:
        raise IndexError(f"variable index {j} out of range for {g.nvars} variables")
    a = f.coeffs
    terms = {e: c * a[e[j]] for e, c in g.terms.items() if e[j] < len(a) and a[e[j]] != 0}
    return MultiPoly(g.nvars, terms)


def exp_transform(f: MultiPoly, j: int = 0) -> MultiPoly:
    """x_j^i -> x_j^i / i!."""
    if not 0 <= j < f.nvars:
        raise IndexError(f"variable index {j} out of range for {f.nvars} variables")
    return MultiPoly(f.nvars, {e: c / math.factorial(e[j]) for e, c in f.terms.items()})


def _double_slice(F: MultiPoly, j1: int, j2: int, k1: int, k2: int) -> MultiPoly:
    s = coefficient_slice(F, j1, k1)
    return coefficient_slice(s, j2 - 1 if j2 > j1 else j2, k2)


def coeff_hankel_det(F: MultiPoly, j, r: int, base: int = 0) -> MultiPoly:
    """Determinant of a matrix of coefficient slices.

    ``j`` an index: the r x r Hankel matrix [f_{base+a+b}] of slices along x_j.
    ``j`` a pair (j1, j2): the r x r matrix whose (a, b) entry is the
    coefficient of x_{j1}^{base+b} x_{j2}^{base+a}.  The result is a
    polynomial in the remaining variables.
    """
    if r < 1 or base < 0:
        raise IndexError("size must be >= 1 and base offset >= 0")
    if isinstance(j, (tuple, list)):
        j1, j2 = j
        if j1 == j2:
            raise ValueError("the two slice variables must differ")
        entries = [[_double_slice(F, j1, j2, base + b, base + a) for b in range(r)] for a in range(r)]
    else:
        slices = {k: coefficient_slice(F, j, k) for k in range(base, base + 2 * r - 1)}
        entries = [[slices[base + a + b] for b in range(r)] for a in range(r)]
    return poly_det(entries)


def alpha_two_det(F: MultiPoly, j: int, alpha: float) -> tuple[MultiPoly, MultiPoly]:
    """(f_0^2, f_1^2 - alpha f_0 f_2) for slices along x_j."""
    if not 0 < alpha < 2:
        raise ValueError("alpha must lie in (0, 2)")
    f0, f1, f2 = (coefficient_slice(F, j, k) for k in range(3))
    return f0 * f0, f1 * f1 - (f0 * f2).scale(alpha)


def pencil_coeff_det(spec: PencilSpec) -> UniPoly:
    """fk - gh for |I + x D1 + y D2 + z D3| = f + y g + z h + yz k + ..."""
    if spec.d != 3:
        raise ValueError("pencil_coeff_det needs exactly three matrices")
    if spec.tail_kind != "none":
        raise ValueError("pencil_coeff_det takes a pencil without tail")
    D1, D2, D3 = spec.D
    if not np.array_equal(D1, np.diag(np.diag(D1))):
        raise ValueError("D1 must be diagonal")
    if not (np.all(D2 > 0) and np.all(D3 > 0)):
        raise ValueError("D2 and D3 must have all entries positive")
    P = det_pencil(spec).poly
    f, g, h, k = (UniPoly.from_multi(_double_slice(P, 1, 2, a, b)) for a, b in ((0, 0), (1, 0), (0, 1), (1, 1)))
    return f * k - g * h


def random_pencil_coeff_spec(n: int, seed=None) -> PencilSpec:
    rng = np.random.default_rng(seed)
    D1 = np.diag(rng.uniform(0.1, 2.0, size=n))
    return PencilSpec((D1, random_pd(n, rng, positive=True), random_pd(n, rng, positive=True)))


# -- random certified-stable polynomials ------------------------------------------------

RECIPES = ("product", "pencil", "compose")


def _affine_form(nvars: int, rng, real: bool) -> MultiPoly:
    k = int(rng.integers(1, nvars + 1))
    support = rng.choice(nvars, size=k, replace=False)
    terms = {}
    for j in support:
        e = [0] * nvars
        e[j] = 1
        terms[tuple(e)] = float(rng.uniform(0.2, 2.0))
    if real:
        a = float(rng.uniform(0.1, 2.0))
    else:
        a = complex(rng.uniform(0.0, 2.0), rng.uniform(-2.0, 2.0))
    terms[(0,) * nvars] = a
    return MultiPoly(nvars, terms)


def random_product(nvars: int, degree: int, rng, real: bool = False) -> MultiPoly:
    rng = np.random.default_rng(rng)
    p = MultiPoly.constant(1.0, nvars)
    for _ in range(degree):
        p = p * _affine_form(nvars, rng, real)
    if not real:
        p = p.scale(complex(np.exp(1j * rng.uniform(-np.pi, np.pi))))
    return p


def _closure_step(f: MultiPoly, rng, real: bool) -> MultiPoly:
    op = rng.choice(["derivative", "reverse", "scale", "shift"])
    j = int(rng.integers(f.nvars))
    if op == "derivative":
        for jj in [j] + list(range(f.nvars)):
            g = partial_derivative(f, jj)
            if not g.is_zero():
                return g
        return f
    if op == "reverse":
        return reverse_in_var(f, j)
    rules = [Keep()] * f.nvars
    if op == "scale":
        rules = [Scale(float(rng.uniform(0.2, 3.0))) for _ in range(f.nvars)]
    else:
        sigma = complex(rng.uniform(0.05, 2.0), 0.0 if real else rng.uniform(-2.0, 2.0))
        rules[j] = Shift(sigma)
    return affine_substitute(f, AffineSubstitution(tuple(rules)))


def random_stable(nvars: int, degree: int, seed=None, recipe: str | None = None, real: bool = False) -> Certified:
    """Draw a certified-stable polynomial.

    Recipes: ``product`` of affine forms a + sum b_j x_j (b_j > 0, Re a >= 0),
    ``pencil`` (det_pencil with n = degree), ``compose`` (a closure operation
    applied to one of the others).  ``real`` restricts to real coefficients,
    which are then all positive.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    rng = np.random.default_rng(seed)
    recipe = recipe or RECIPES[int(rng.integers(len(RECIPES)))]
    if recipe == "product":
        return Certified(random_product(nvars, degree, rng, real), "product_affine")
    if recipe == "pencil":
        tails = ("none", "skew") if real else TAIL_KINDS
        tail = tails[int(rng.integers(len(tails)))]
        return det_pencil(PencilSpec.random(degree, nvars, tail, rng))
    if recipe == "compose":
        inner = random_stable(nvars, degree + 1, rng, RECIPES[int(rng.integers(2))], real)
        return Certified(_closure_step(inner.poly, rng, real), "closure")
    raise ValueError(f"unknown recipe {recipe!r}")


def random_ppos(nvars: int, degree: int, seed=None) -> MultiPoly:
    """Member of Ppos: product of positive linear forms, or an untailed real pencil."""
    rng = np.random.default_rng(seed)
    if rng.uniform() < 0.5:
        return random_product(nvars, degree, rng, real=True)
    return det_pencil(PencilSpec.random(degree, nvars, "none", rng)).poly
