"""Truncated formal power series in hbar with graded-polynomial coefficients."""
from __future__ import annotations

from collections.abc import Sequence

from .graded import GradedPoly, Scalar

DEFAULT_ORDER = 4


class HbarSeries:
    """``sum_{k=0}^{N} hbar^k coeffs[k]``; everything above ``hbar^N`` is dropped."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Sequence[GradedPoly], order: int = DEFAULT_ORDER):
        if order < 1:
            raise ValueError("truncation order must be >= 1")
        coeffs = list(coeffs)[: order + 1]
        coeffs += [GradedPoly()] * (order + 1 - len(coeffs))
        self.coeffs: tuple[GradedPoly, ...] = tuple(coeffs)
        self.order = order

    @classmethod
    def from_poly(cls, p: GradedPoly | Scalar, order: int = DEFAULT_ORDER) -> HbarSeries:
        if not isinstance(p, GradedPoly):
            p = GradedPoly.constant(p)
        return cls([p], order)

    @classmethod
    def hbar(cls, order: int = DEFAULT_ORDER) -> HbarSeries:
        return cls([GradedPoly(), GradedPoly.constant(1)], order)

    def coeff(self, k: int) -> GradedPoly:
        return self.coeffs[k] if 0 <= k <= self.order else GradedPoly()

    def _check(self, other: HbarSeries) -> None:
        if not isinstance(other, HbarSeries):
            raise TypeError(f"expected HbarSeries, got {type(other).__name__}")
        if other.order != self.order:
            raise ValueError(f"truncation order mismatch: {self.order} vs {other.order}")

    def __add__(self, other: HbarSeries) -> HbarSeries:
        self._check(other)
        return HbarSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __sub__(self, other: HbarSeries) -> HbarSeries:
        self._check(other)
        return HbarSeries([a - b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __neg__(self) -> HbarSeries:
        return HbarSeries([-a for a in self.coeffs], self.order)

    def scale(self, s: Scalar) -> HbarSeries:
        return HbarSeries([a.scale(s) for a in self.coeffs], self.order)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HbarSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    __hash__ = None  # type: ignore[assignment]

    def max_abs(self) -> float:
        return max(c.max_abs() for c in self.coeffs)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def parity(self) -> int | None:
        found = {c.parity() for c in self.coeffs if not c.is_zero()}
        if not found:
            return 0
        return found.pop() if len(found) == 1 else None

    def ghost_number(self) -> int | None:
        found = {c.ghost_number() for c in self.coeffs if not c.is_zero()}
        if not found:
            return 0
        return found.pop() if len(found) == 1 else None

    def parity_part(self, p: int) -> HbarSeries:
        return HbarSeries([c.parity_part(p) for c in self.coeffs], self.order)

    def __repr__(self) -> str:
        body = ", ".join(f"h^{k}: {c.to_text()}" for k, c in enumerate(self.coeffs) if c)
        return f"HbarSeries(order={self.order}, {{{body}}})"
