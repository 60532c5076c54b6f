"""Linear operators built from differentiation that preserve stability.

Symbols are polynomials; a symbol f acts either as f(d/dx) ("pure") or,
for a symbol in 2d variables split into blocks (x, y), as f(x, d/dy) on
polynomials in the same 2d variables ("mixed").  All actions are exact
finite sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .polycore import MultiPoly

MODES = ("pure", "mixed")


def _falling(a: int, e: int) -> int:
    return math.perm(a, e)


def _weyl_apply(ops: Iterable[tuple[complex, tuple, tuple]], g: MultiPoly) -> MultiPoly:
    """sum_k c_k x^{m_k} d^{e_k} g for ops (c_k, m_k, e_k)."""
    ops = list(ops)
    out: dict = {}
    for a, b in g.terms.items():
        for c, m, e in ops:
            if any(ai < ei for ai, ei in zip(a, e)):
                continue
            k = 1
            for ai, ei in zip(a, e):
                k *= _falling(ai, ei)
            new = tuple(ai - ei + mi for ai, ei, mi in zip(a, e, m))
            out[new] = out.get(new, 0) + c * b * k
    return MultiPoly(g.nvars, {e: c for e, c in out.items() if c != 0})


def apply_diffop(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """f(d/dx_1, ..., d/dx_d) applied to g."""
    if f.nvars != g.nvars:
        raise ValueError(f"dimension mismatch: symbol has {f.nvars} variables, operand {g.nvars}")
    zero = (0,) * g.nvars
    return _weyl_apply(((c, zero, e) for e, c in f.terms.items()), g)


def _blocks(nvars: int) -> int:
    if nvars % 2:
        raise ValueError(f"a mixed symbol needs an even number of variables, got {nvars}")
    return nvars // 2


def apply_mixed(fsym: MultiPoly, g: MultiPoly) -> MultiPoly:
    """f(x, d/dy) applied to g(x, y); both in 2d variables, x first.

    The x block of each symbol monomial multiplies and the y block differentiates.
    """
    d = _blocks(fsym.nvars)
    if g.nvars != fsym.nvars:
        raise ValueError(f"dimension mismatch: symbol has {fsym.nvars} variables, operand {g.nvars}")
    zero = (0,) * d
    ops = ((c, e[:d] + zero, zero + e[d:]) for e, c in fsym.terms.items())
    return _weyl_apply(ops, g)


def exp_mixed(f: MultiPoly) -> MultiPoly:
    """exp(d/dx . d/dy) f = sum_k (sum_j d/dx_j d/dy_j)^k f / k!, which terminates."""
    d = _blocks(f.nvars)
    zero = (0,) * f.nvars
    ops = []
    for j in range(d):
        e = [0] * f.nvars
        e[j] = e[d + j] = 1
        ops.append((1.0, zero, tuple(e)))
    total, term, k = f, f, 0
    while not term.is_zero():
        k += 1
        term = _weyl_apply(ops, term).scale(1.0 / k)
        total = total + term
    return total


@dataclass(frozen=True)
class DiffOpSpec:
    symbol: MultiPoly
    mode: str = "pure"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.mode == "mixed":
            _blocks(self.symbol.nvars)

    def apply(self, g: MultiPoly) -> MultiPoly:
        if self.mode == "pure":
            return apply_diffop(self.symbol, g)
        return apply_mixed(self.symbol, g)

    def to_json(self) -> dict:
        return {**self.symbol.to_json(), "mode": self.mode}

    @classmethod
    def from_json(cls, data: dict) -> "DiffOpSpec":
        return cls(MultiPoly.from_json(data), data.get("mode", "pure"))
