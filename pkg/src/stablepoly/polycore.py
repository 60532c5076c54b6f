"""Sparse multivariate polynomials over complex doubles.

A :class:`MultiPoly` is an immutable map from fixed-length exponent tuples to
complex coefficients.  Variables are indexed from 0 internally; the text
format names them ``x1 .. xd``.

Besides ring arithmetic this module carries the syntactic transforms the
stability closure operations are phrased in: affine substitutions,
derivatives, coefficient slices, reversal, parity split, top homogeneous
part and the half-plane rotation.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

_TINY, _HUGE = float(np.finfo(float).tiny), float(np.finfo(float).max)

Exponent = tuple[int, ...]
Scalar = Union[int, float, complex]

# relative threshold for dropping round-off residue after arithmetic
DROP_RTOL = 1e-14


class PolySyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


def _check_finite(c: complex) -> complex:
    c = complex(c)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise ValueError(f"non-finite coefficient {c!r}")
    return c


def _canon(terms: dict, mags: dict | None) -> dict:
    """Drop exact zeros and, when ``mags`` is given, cancellation residue.

    ``mags[e]`` is the sum of the magnitudes of all contributions to the
    coefficient of ``e``; a coefficient is dropped when it is below
    ``DROP_RTOL`` times that sum.  An uncancelled coefficient is never
    dropped, however small it is next to the others.
    """
    if mags is None:
        return {e: c for e, c in terms.items() if c != 0}
    return {e: c for e, c in terms.items() if c != 0 and abs(c) > DROP_RTOL * mags[e]}


class MultiPoly:
    """Immutable sparse polynomial in ``nvars`` variables.

    Exact zeros are never stored.  Arithmetic results additionally drop
    coefficients that cancelled to below ``1e-14`` times the magnitude of
    their contributions; the constructor itself never drops a nonzero value.
    """

    __slots__ = ("nvars", "_terms")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], Scalar] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        clean: dict[Exponent, complex] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars:
                raise ValueError(f"exponent {exp} does not have length {nvars}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = _check_finite(c)
            if c != 0:
                clean[exp] = clean.get(exp, 0) + c
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "_terms", {e: c for e, c in clean.items() if c != 0})

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "MultiPoly":
        obj = object.__new__(cls)
        object.__setattr__(obj, "nvars", nvars)
        object.__setattr__(obj, "_terms", terms)
        return obj

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, c: Scalar, nvars: int) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, j: int, nvars: int) -> "MultiPoly":
        if not 0 <= j < nvars:
            raise IndexError(f"variable index {j} out of range for {nvars} variables")
        exp = [0] * nvars
        exp[j] = 1
        return cls(nvars, {tuple(exp): 1.0})

    @property
    def terms(self) -> Mapping[Exponent, complex]:
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def degree_in(self, j: int) -> int:
        self._check_index(j)
        if not self._terms:
            return -1
        return max(e[j] for e in self._terms)

    def coeff(self, exp: Sequence[int]) -> complex:
        return self._terms.get(tuple(exp), 0j)

    def max_abs(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def is_real(self, rtol: float = 1e-12) -> bool:
        cut = rtol * self.max_abs()
        return all(abs(c.imag) <= cut for c in self._terms.values())

    def has_positive_coefficients(self, rtol: float = 1e-12) -> bool:
        """All stored coefficients are (numerically) real and positive."""
        return self.is_real(rtol) and all(c.real > 0 for c in self._terms.values())

    def _check_index(self, j: int) -> None:
        if not 0 <= j < self.nvars:
            raise IndexError(f"variable index {j} out of range for {self.nvars} variables")

    def _check_same(self, other: "MultiPoly") -> None:
        if self.nvars != other.nvars:
            raise ValueError(f"dimension mismatch: {self.nvars} vs {other.nvars} variables")

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check_same(other)
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return MultiPoly.constant(complex(other), self.nvars)
        return NotImplemented

    # -- arithmetic ---------------------------------------------------------

    def add(self, other: "MultiPoly", exact: bool = False) -> "MultiPoly":
        self._check_same(other)
        out = dict(self._terms)
        mags = {e: abs(c) for e, c in self._terms.items()}
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
            mags[e] = mags.get(e, 0.0) + abs(c)
        return MultiPoly._raw(self.nvars, _canon(out, None if exact else mags))

    def mul(self, other: "MultiPoly", exact: bool = False) -> "MultiPoly":
        self._check_same(other)
        out: dict[Exponent, complex] = {}
        mags: dict[Exponent, float] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
                mags[e] = mags.get(e, 0.0) + abs(c1) * abs(c2)
        return MultiPoly._raw(self.nvars, _canon(out, None if exact else mags))

    def scale(self, alpha: Scalar) -> "MultiPoly":
        alpha = _check_finite(alpha)
        if alpha == 0:
            return MultiPoly.zero(self.nvars)
        return MultiPoly._raw(self.nvars, {e: c * alpha for e, c in self._terms.items()})

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.add(other)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.add(-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other.add(-self)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(other)
        if isinstance(other, MultiPoly):
            return self.mul(other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(1 / complex(other))
        return NotImplemented

    def __pow__(self, n: int) -> "MultiPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = MultiPoly.constant(1.0, self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self._terms.items())))

    def allclose(self, other: "MultiPoly", rtol: float = 1e-10, atol: float = 0.0) -> bool:
        self._check_same(other)
        scale = max(self.max_abs(), other.max_abs())
        for e in set(self._terms) | set(other._terms):
            if abs(self.coeff(e) - other.coeff(e)) > atol + rtol * scale:
                return False
        return True

    # -- evaluation ---------------------------------------------------------

    def __call__(self, *point) -> complex:
        if len(point) == 1 and isinstance(point[0], (list, tuple, np.ndarray)):
            point = tuple(point[0])
        return evaluate(self, point)

    def exponent_matrix(self) -> tuple[np.ndarray, np.ndarray]:
        """Exponents as an (nterms, nvars) int array and the matching coefficients."""
        if not self._terms:
            return np.zeros((0, self.nvars), dtype=np.int64), np.zeros(0, dtype=complex)
        exps = np.array(list(self._terms.keys()), dtype=np.int64).reshape(len(self._terms), self.nvars)
        coefs = np.array(list(self._terms.values()), dtype=complex)
        return exps, coefs

    # -- structure ----------------------------------------------------------

    def extend(self, k: int = 1) -> "MultiPoly":
        """Append ``k`` unused variables."""
        pad = (0,) * k
        return MultiPoly._raw(self.nvars + k, {e + pad: c for e, c in self._terms.items()})

    def permute(self, order: Sequence[int]) -> "MultiPoly":
        """New variable ``i`` is old variable ``order[i]``."""
        if sorted(order) != list(range(self.nvars)):
            raise ValueError(f"{order} is not a permutation of {self.nvars} variables")
        return MultiPoly._raw(self.nvars, {tuple(e[k] for k in order): c for e, c in self._terms.items()})

    def __repr__(self) -> str:
        return f"MultiPoly({self.nvars}, {format_text(self)!r})"

    def __str__(self) -> str:
        return format_text(self)

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [
                {"exp": list(e), "re": c.real, "im": c.imag}
                for e, c in sorted(self._terms.items(), key=lambda t: (sum(t[0]), t[0]))
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "MultiPoly":
        try:
            nvars = int(data["nvars"])
            terms: dict[Exponent, complex] = {}
            for t in data["terms"]:
                e = tuple(int(v) for v in t["exp"])
                terms[e] = terms.get(e, 0) + complex(float(t["re"]), float(t.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed MultiPoly JSON: {exc}") from exc
        return cls(nvars, terms)


def evaluate(f: MultiPoly, point: Sequence[Scalar]) -> complex:
    if len(point) != f.nvars:
        raise ValueError(f"point has {len(point)} coordinates, polynomial has {f.nvars} variables")
    pt = [complex(p) for p in point]
    total = 0j
    for exp, c in f.terms.items():
        term = c
        for z, e in zip(pt, exp):
            if e:
                term *= z**e  # int powers use binary exponentiation
        total += term
    return total


def evaluation_scale(f: MultiPoly, point: Sequence[Scalar]) -> float:
    """sum |c| prod |z_k|^e_k, the natural size of f's terms at ``point``."""
    pt = [abs(complex(p)) for p in point]
    total = 0.0
    for exp, c in f.terms.items():
        term = abs(c)
        for z, e in zip(pt, exp):
            if e:
                term *= z**e
        total += term
    return total


def evaluate_many(f: MultiPoly, points: np.ndarray) -> np.ndarray:
    """Vectorized evaluation at the rows of a (B, nvars) complex array."""
    points = np.asarray(points, dtype=complex).reshape(-1, f.nvars)
    exps, coefs = f.exponent_matrix()
    if len(coefs) == 0:
        return np.zeros(points.shape[0], dtype=complex)
    mono = np.prod(points[:, None, :] ** exps[None, :, :], axis=2)
    return mono @ coefs


# -- univariate ---------------------------------------------------------------


class UniPoly:
    """Dense univariate polynomial, ascending coefficients, no trailing zeros."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar]):
        arr = np.atleast_1d(np.asarray(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                                       dtype=complex)).copy()
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite coefficient")
        nz = np.nonzero(arr)[0]
        arr = arr[: nz[-1] + 1] if len(nz) else arr[:0]
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("UniPoly is immutable")

    @classmethod
    def from_roots(cls, roots: Iterable[Scalar], lead: Scalar = 1.0) -> "UniPoly":
        roots = list(roots)
        if not roots:
            return cls([lead])
        return cls(complex(lead) * npoly.polyfromroots(np.asarray(roots, dtype=complex)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    @property
    def lead(self) -> complex:
        return complex(self.coeffs[-1]) if len(self.coeffs) else 0j

    def is_real(self, rtol: float = 1e-12) -> bool:
        if self.is_zero():
            return True
        return bool(np.all(np.abs(self.coeffs.imag) <= rtol * np.max(np.abs(self.coeffs))))

    def __call__(self, z):
        if self.is_zero():
            return np.zeros_like(np.asarray(z, dtype=complex)) if np.ndim(z) else 0j
        return npoly.polyval(z, self.coeffs)

    def deriv(self, k: int = 1) -> "UniPoly":
        if self.degree < k:
            return UniPoly([])
        return UniPoly(npoly.polyder(self.coeffs, k))

    def _coerce(self, other):
        if isinstance(other, UniPoly):
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return UniPoly([other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        return UniPoly(npoly.polyadd(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return UniPoly(-self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return UniPoly([])
        return UniPoly(npoly.polymul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, UniPoly):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self) -> int:
        return hash(self.coeffs.tobytes())

    def allclose(self, other: "UniPoly", rtol: float = 1e-10) -> bool:
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n, dtype=complex)
        b = np.zeros(n, dtype=complex)
        a[: len(self.coeffs)] = self.coeffs
        b[: len(other.coeffs)] = other.coeffs
        scale = max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0))
        return bool(np.all(np.abs(a - b) <= rtol * scale))

    def to_multi(self) -> MultiPoly:
        return MultiPoly(1, {(i,): c for i, c in enumerate(self.coeffs)})

    @classmethod
    def from_multi(cls, f: MultiPoly) -> "UniPoly":
        if f.nvars != 1:
            raise ValueError(f"expected a 1-variable polynomial, got {f.nvars}")
        if f.is_zero():
            return cls([])
        arr = np.zeros(f.degree + 1, dtype=complex)
        for (e,), c in f.terms.items():
            arr[e] = c
        return cls(arr)

    def __repr__(self) -> str:
        return f"UniPoly({[complex(c) for c in self.coeffs]!r})"


def as_unipoly(p: UniPoly | MultiPoly | Sequence[Scalar]) -> UniPoly:
    if isinstance(p, UniPoly):
        return p
    if isinstance(p, MultiPoly):
        return UniPoly.from_multi(p)
    return UniPoly(p)


# -- text format --------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?P<imag>i)?"
    r"|x(?P<var>\d+)"
    r"|(?P<i>i)"
    r"|(?P<op>[-+*^()])"
    r")"
)


def _tokenize(s: str) -> list[tuple[str, object, int]]:
    tokens = []
    pos = 0
    s = s.rstrip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise PolySyntaxError(f"unexpected character {s[pos]!r}", pos)
        start = m.start(m.lastgroup) if m.lastgroup else pos
        if m.group("num") is not None:
            val = float(m.group("num"))
            tokens.append(("num", complex(0, val) if m.group("imag") else complex(val), start))
        elif m.group("var") is not None:
            tokens.append(("var", int(m.group("var")), start))
        elif m.group("i") is not None:
            tokens.append(("num", 1j, start))
        else:
            tokens.append((m.group("op"), None, start))
        pos = m.end()
    tokens.append(("end", None, len(s)))
    return tokens


class _Parser:
    def __init__(self, s: str, nvars: int):
        self.tokens = _tokenize(s)
        self.i = 0
        self.nvars = nvars

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise PolySyntaxError(f"expected {kind!r}, found {tok[0]!r}", tok[2])
        self.i += 1
        return tok

    def expr(self) -> MultiPoly:
        sign = 1.0
        if self.peek()[0] in "+-":
            sign = -1.0 if self.take()[0] == "-" else 1.0
        acc = self.term().scale(sign) if sign < 0 else self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            acc = acc.add(rhs if op == "+" else -rhs, exact=True)
        return acc

    def term(self) -> MultiPoly:
        acc = self.factor()
        while self.peek()[0] == "*":
            self.take()
            acc = acc.mul(self.factor(), exact=True)
        return acc

    def factor(self) -> MultiPoly:
        if self.peek()[0] == "-":
            self.take()
            return -self.factor()
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "num" or val.imag != 0 or val.real != int(val.real):
                raise PolySyntaxError("exponent must be a non-negative integer", pos)
            n = int(val.real)
            result = MultiPoly.constant(1.0, self.nvars)
            for _ in range(n):
                result = result.mul(base, exact=True)
            return result
        return base

    def atom(self) -> MultiPoly:
        kind, val, pos = self.take()
        if kind == "num":
            return MultiPoly.constant(val, self.nvars)
        if kind == "var":
            if val < 1 or val > self.nvars:
                raise PolySyntaxError(f"variable x{val} out of declared range 1..{self.nvars}", pos)
            return MultiPoly.variable(val - 1, self.nvars)
        if kind == "(":
            inner = self.expr()
            self.take(")")
            return inner
        raise PolySyntaxError(f"unexpected token {kind!r}", pos)


def parse_text(s: str, nvars: int | None = None) -> MultiPoly:
    """Parse a polynomial expression in variables ``x1 .. xd``.

    Accepts the canonical term format produced by :func:`format_text` as well
    as general expressions with parentheses, products and integer powers,
    e.g. ``"x1*(x1+3) + x2*(x1+1)*(x1+2)"``.  When ``nvars`` is omitted it is
    the largest variable index used.
    """
    used = [int(m) for m in re.findall(r"x(\d+)", s)]
    if nvars is None:
        nvars = max(used, default=0)
    parser = _Parser(s, nvars)
    if parser.peek()[0] == "end":
        raise PolySyntaxError("empty polynomial", 0)
    poly = parser.expr()
    kind, _, pos = parser.peek()
    if kind != "end":
        raise PolySyntaxError(f"trailing input {kind!r}", pos)
    return poly


def _fmt_coef(c: complex) -> str:
    im = c.imag
    sign = "-" if (im < 0 or (im == 0 and math.copysign(1.0, im) < 0)) else "+"
    return f"({c.real!r}{sign}{abs(im)!r}i)"


def format_text(f: MultiPoly) -> str:
    if f.is_zero():
        return "(0.0+0.0i)"
    parts = []
    for exp, c in sorted(f.terms.items(), key=lambda t: (sum(t[0]), t[0])):
        s = _fmt_coef(c)
        for k, e in enumerate(exp):
            if e == 1:
                s += f"*x{k + 1}"
            elif e > 1:
                s += f"*x{k + 1}^{e}"
        parts.append(s)
    return " + ".join(parts)


# -- substitutions ------------------------------------------------------------


@dataclass(frozen=True)
class Keep:
    pass


@dataclass(frozen=True)
class Scale:
    a: float


@dataclass(frozen=True)
class Shift:
    sigma: complex


@dataclass(frozen=True)
class FixValue:
    sigma: complex


@dataclass(frozen=True)
class FixImaginary:
    a: float


@dataclass(frozen=True)
class RenameTo:
    target: int


@dataclass(frozen=True)
class SplitSum:
    """x_j -> x_j + x_other, or x_j + (fresh variable) when ``other`` is None."""

    other: int | None = None


Rule = Union[Keep, Scale, Shift, FixValue, FixImaginary, RenameTo, SplitSum]
_ELIMINATING = (FixValue, FixImaginary, RenameTo)


@dataclass(frozen=True)
class AffineSubstitution:
    """One rule per variable.

    Output variables are the surviving input variables in order, followed by
    one fresh variable per ``SplitSum()`` with no partner.  Fixed and renamed
    slots are eliminated.
    """

    rules: tuple

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))

    def layout(self, nvars: int) -> tuple[dict[int, int], int]:
        if len(self.rules) != nvars:
            raise ValueError(f"{len(self.rules)} rules for {nvars} variables")
        surviving = [j for j, r in enumerate(self.rules) if not isinstance(r, _ELIMINATING)]
        index = {j: k for k, j in enumerate(surviving)}
        fresh = sum(1 for r in self.rules if isinstance(r, SplitSum) and r.other is None)
        for j, r in enumerate(self.rules):
            if isinstance(r, Scale) and not (math.isfinite(r.a) and r.a != 0):
                raise ValueError(f"rule {j}: scale factor must be finite and nonzero")
            if isinstance(r, (Shift, FixValue)) and not math.isfinite(abs(complex(r.sigma))):
                raise ValueError(f"rule {j}: non-finite value")
            if isinstance(r, RenameTo) and r.target not in index:
                raise ValueError(f"rule {j}: rename target {r.target} is not a surviving variable")
            if isinstance(r, SplitSum) and r.other is not None and r.other not in index:
                raise ValueError(f"rule {j}: split partner {r.other} is not a surviving variable")
        return index, len(surviving) + fresh

    def preserves_stability(self) -> bool:
        """True when every rule is one of the stability-preserving closure operations."""
        for r in self.rules:
            if isinstance(r, Scale) and not r.a > 0:
                return False
            if isinstance(r, (Shift, FixValue)) and not complex(r.sigma).real > 0:
                return False
            if isinstance(r, FixImaginary):
                return False
        return True


def compose(f: MultiPoly, images: Sequence[MultiPoly]) -> MultiPoly:
    """Substitute ``images[j]`` for variable ``j``; all images share one ring."""
    if len(images) != f.nvars:
        raise ValueError(f"{len(images)} images for {f.nvars} variables")
    if not images:
        return f
    nout = images[0].nvars
    powers: list[list[MultiPoly]] = [[MultiPoly.constant(1.0, nout)] for _ in images]

    def power(j: int, e: int) -> MultiPoly:
        cache = powers[j]
        while len(cache) <= e:
            cache.append(cache[-1] * images[j])
        return cache[e]

    out: dict[Exponent, complex] = {}
    mags: dict[Exponent, float] = {}
    for exp, c in f.terms.items():
        term = MultiPoly.constant(c, nout)
        for j, e in enumerate(exp):
            if e:
                term = term * power(j, e)
        for e2, c2 in term.terms.items():
            out[e2] = out.get(e2, 0) + c2
            mags[e2] = mags.get(e2, 0.0) + abs(c2)
    return MultiPoly._raw(nout, _canon(out, mags))


def _representable_power(v: complex, deg: int, j: int) -> complex:
    """v itself, after checking that v**deg stays in the normal double range.

    Otherwise the substituted coefficients would silently underflow to zero
    (or overflow), and the result would be a different polynomial.
    """
    if v != 0 and deg > 0:
        log_mag = deg * math.log(abs(v))
        if not math.log(_TINY) < log_mag < math.log(_HUGE):
            raise FloatingPointError(f"x{j + 1} = {v:.3g} to the power {deg} leaves the double range")
    return v


def affine_substitute(f: MultiPoly, sub: AffineSubstitution) -> MultiPoly:
    index, nout = sub.layout(f.nvars)
    next_fresh = len(index)
    images = []
    for j, r in enumerate(sub.rules):
        if isinstance(r, Keep):
            img = MultiPoly.variable(index[j], nout)
        elif isinstance(r, Scale):
            img = MultiPoly.variable(index[j], nout).scale(r.a)
        elif isinstance(r, Shift):
            img = MultiPoly.variable(index[j], nout) + complex(r.sigma)
        elif isinstance(r, FixValue):
            img = MultiPoly.constant(_representable_power(complex(r.sigma), f.degree_in(j), j), nout)
        elif isinstance(r, FixImaginary):
            img = MultiPoly.constant(_representable_power(complex(0.0, r.a), f.degree_in(j), j), nout)
        elif isinstance(r, RenameTo):
            img = MultiPoly.variable(index[r.target], nout)
        elif isinstance(r, SplitSum):
            if r.other is None:
                partner = next_fresh
                next_fresh += 1
            else:
                partner = index[r.other]
            img = MultiPoly.variable(index[j], nout) + MultiPoly.variable(partner, nout)
        else:
            raise ValueError(f"malformed rule {r!r}")
        images.append(img)
    return compose(f, images)


# -- structural transforms ----------------------------------------------------


def partial_derivative(f: MultiPoly, j: int) -> MultiPoly:
    f._check_index(j)
    out = {}
    for e, c in f.terms.items():
        if e[j]:
            e2 = list(e)
            e2[j] -= 1
            out[tuple(e2)] = c * e[j]
    return MultiPoly._raw(f.nvars, out)


def coefficient_slice(f: MultiPoly, j: int, k: int) -> MultiPoly:
    """The coefficient of ``x_j**k``, as a polynomial in the other variables."""
    f._check_index(j)
    out = {}
    for e, c in f.terms.items():
        if e[j] == k:
            out[e[:j] + e[j + 1 :]] = c
    return MultiPoly._raw(f.nvars - 1, out)


def coefficient_slices(f: MultiPoly, j: int) -> list[MultiPoly]:
    return [coefficient_slice(f, j, k) for k in range(max(f.degree_in(j), 0) + 1)]


def insert_variable(f: MultiPoly, j: int, power: int = 0) -> MultiPoly:
    """Embed f into nvars+1 variables with a new slot at ``j`` raised to ``power``."""
    if not 0 <= j <= f.nvars:
        raise IndexError(f"slot {j} out of range")
    return MultiPoly._raw(f.nvars + 1, {e[:j] + (power,) + e[j:]: c for e, c in f.terms.items()})


def reverse_in_var(f: MultiPoly, j: int) -> MultiPoly:
    """sum f_i x_j^(n-i) with n = deg_j f."""
    n = f.degree_in(j)
    out = {}
    for e, c in f.terms.items():
        e2 = list(e)
        e2[j] = n - e[j]
        out[tuple(e2)] = c
    return MultiPoly._raw(f.nvars, out)


def even_odd_parts(f: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    even = {e: c for e, c in f.terms.items() if sum(e) % 2 == 0}
    odd = {e: c for e, c in f.terms.items() if sum(e) % 2 == 1}
    return MultiPoly._raw(f.nvars, even), MultiPoly._raw(f.nvars, odd)


def top_homogeneous(f: MultiPoly) -> MultiPoly:
    if f.is_zero():
        raise ValueError("top homogeneous part of the zero polynomial is undefined")
    n = f.degree
    return MultiPoly._raw(f.nvars, {e: c for e, c in f.terms.items() if sum(e) == n})


class Rotation(enum.Enum):
    STABLE_TO_UPPER = "stable_to_upper"  # x_j -> -i x_j
    UPPER_TO_STABLE = "upper_to_stable"  # x_j -> i x_j


_I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)


def rotate_halfplane(f: MultiPoly, direction: Rotation) -> MultiPoly:
    """Exchange right and upper half plane stability by ``x_j -> +-i x_j``.

    Multiplication by a power of i only swaps and negates parts, so a round
    trip reproduces coefficients exactly.
    """
    direction = Rotation(direction)
    step = 1 if direction is Rotation.UPPER_TO_STABLE else 3
    return MultiPoly._raw(f.nvars, {e: c * _I_POWERS[(step * sum(e)) % 4] for e, c in f.terms.items()})


def restrict_line(f: MultiPoly, base: Sequence[Scalar], direction: Sequence[float]) -> UniPoly:
    """The univariate polynomial t -> f(base + t*direction)."""
    if len(base) != f.nvars or len(direction) != f.nvars:
        raise ValueError("base and direction must have one entry per variable")
    if not any(d != 0 for d in direction):
        raise ValueError("direction must be non-zero")
    images = [MultiPoly(1, {(0,): complex(b), (1,): float(d)}) for b, d in zip(base, direction)]
    return UniPoly.from_multi(compose(f, images))


def fix_others(f: MultiPoly, j: int, point: Sequence[Scalar]) -> UniPoly:
    """Restriction to variable ``j`` with every other variable fixed at ``point``."""
    f._check_index(j)
    deg = max(f.degree_in(j), 0)
    arr = np.zeros(deg + 1, dtype=complex)
    pt = [complex(p) for p in point]
    for e, c in f.terms.items():
        v = c
        for k, (z, ek) in enumerate(zip(pt, e)):
            if k != j and ek:
                v *= z**ek
        arr[e[j]] += v
    return UniPoly(arr)
