"""Graded polynomial algebra on the extended phase space.

Elements are polynomials in the canonical coordinates ``x1, p1, x2, p2``
tensored with the Grassmann algebra generated by one ghost ``C`` (ghost
number +1) and its momentum ``P`` (ghost number -1).

Conventions
-----------
Every monomial is stored in normal order, even part first and then the
ghost factor ``1``, ``C``, ``P`` or ``C*P`` (``C`` to the left of ``P``).
Multiplying two ghost factors applies the Koszul sign, so ``P*C == -C*P``.

Odd derivatives come in two flavours.  The left derivative strips the
generator after moving it to the far left, the right derivative after
moving it to the far right::

    d/dC (C*P)  left  ->  P          (C*P) d/dC  right -> -P
    d/dP (C*P)  left  -> -C          (C*P) d/dP  right ->  C

The graded Poisson bracket is

    {F, G} = sum_i (dF/dx_i dG/dp_i - dF/dp_i dG/dx_i)
             + (F d/dC)(d/dP G) + (F d/dP)(d/dC G)

with right derivatives on ``F`` and left derivatives on ``G``.  It gives
``{x_i, p_i} = {C, P} = {P, C} = 1``; it is graded antisymmetric and obeys
the graded Jacobi and Leibniz identities.
"""
from __future__ import annotations

import math
import re
from collections.abc import Iterable, Mapping
from typing import Union

import numpy as np

EVEN_VARS = ("x1", "p1", "x2", "p2")
ODD_VARS = ("C", "P")

# ghost_mask bits
GHOST_C = 1
GHOST_P = 2
GHOST_LABELS = {0: "", GHOST_C: "C", GHOST_P: "P", GHOST_C | GHOST_P: "C*P"}

ZERO_TOL = 1e-12

# (e1, e2, e3, e4, ghost_mask)
Monomial = tuple[int, int, int, int, int]
Scalar = Union[int, float, complex]

_ODD_DERIV = {
    # (var, side, mask) -> (new mask, sign)
    ("C", "left", GHOST_C): (0, 1),
    ("C", "left", GHOST_C | GHOST_P): (GHOST_P, 1),
    ("C", "right", GHOST_C): (0, 1),
    ("C", "right", GHOST_C | GHOST_P): (GHOST_P, -1),
    ("P", "left", GHOST_P): (0, 1),
    ("P", "left", GHOST_C | GHOST_P): (GHOST_C, -1),
    ("P", "right", GHOST_P): (0, 1),
    ("P", "right", GHOST_C | GHOST_P): (GHOST_C, 1),
}


def ghost_number(mask: int) -> int:
    return (1 if mask & GHOST_C else 0) - (1 if mask & GHOST_P else 0)


def parity(mask: int) -> int:
    return bin(mask).count("1") % 2


def mono_mul(m1: Monomial, m2: Monomial) -> tuple[Monomial | None, int]:
    """Product of two normal-ordered monomials as ``(monomial, sign)``."""
    g1, g2 = m1[4], m2[4]
    if g1 & g2:
        return None, 0
    sign = -1 if (g1 & GHOST_P and g2 & GHOST_C) else 1
    return (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2], m1[3] + m2[3], g1 | g2), sign


def mono_key(m: Monomial) -> tuple:
    """Graded lexicographic sort key: total degree, exponents, ghost mask."""
    return (sum(m[:4]), m[:4], m[4])


def _fmt_real(v: float) -> str:
    if v == 0:
        v = 0.0  # drop the sign of -0.0
    return repr(float(v))


def format_coeff(c: complex) -> str:
    re_, im = c.real, c.imag
    sign = "-" if math.copysign(1.0, im) < 0 and im != 0 else "+"
    return f"{_fmt_real(re_)}{sign}{_fmt_real(abs(im))}i"


def format_monomial(m: Monomial) -> str:
    parts = []
    for name, e in zip(EVEN_VARS, m[:4]):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    if m[4]:
        parts.append(GHOST_LABELS[m[4]])
    return "*".join(parts) if parts else "1"


class GradedPoly:
    """Immutable polynomial on the extended phase space.

    Parameters
    ----------
    terms : mapping from monomial tuples to coefficients
        Coefficients of magnitude below ``tol`` are dropped.
    tol : float
        Zero threshold used to prune the terms.

    Examples
    --------
    >>> x1, p1 = GradedPoly.var("x1"), GradedPoly.var("p1")
    >>> ((x1 + p1) * (x1 - p1)).to_text()
    '-1.0+0.0i*p1^2 + 1.0+0.0i*x1^2'
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None, tol: float = ZERO_TOL):
        clean = {}
        if terms:
            for m, c in terms.items():
                c = complex(c)
                if abs(c) > tol:
                    if len(m) != 5 or any(e < 0 for e in m[:4]) or m[4] not in GHOST_LABELS:
                        raise ValueError(f"invalid monomial {m!r}")
                    clean[tuple(m)] = c
        self._terms = clean

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c: Scalar) -> GradedPoly:
        return cls({(0, 0, 0, 0, 0): c})

    @classmethod
    def var(cls, name: str) -> GradedPoly:
        if name in EVEN_VARS:
            e = [0, 0, 0, 0]
            e[EVEN_VARS.index(name)] = 1
            return cls({(*e, 0): 1})
        if name == "C":
            return cls({(0, 0, 0, 0, GHOST_C): 1})
        if name == "P":
            return cls({(0, 0, 0, 0, GHOST_P): 1})
        raise ValueError(f"unknown generator {name!r}")

    @classmethod
    def zero(cls) -> GradedPoly:
        return cls()

    # -- inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict[Monomial, complex]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def max_abs(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def degree(self) -> int:
        return max((sum(m[:4]) for m in self._terms), default=0)

    def ghost_free(self) -> bool:
        return all(m[4] == 0 for m in self._terms)

    def parity(self) -> int | None:
        """Grassmann parity, or ``None`` if the element mixes parities."""
        found = {parity(m[4]) for m in self._terms}
        if not found:
            return 0
        return found.pop() if len(found) == 1 else None

    def ghost_number(self) -> int | None:
        found = {ghost_number(m[4]) for m in self._terms}
        if not found:
            return 0
        return found.pop() if len(found) == 1 else None

    def ghost_sector(self, mask: int) -> GradedPoly:
        """The ghost-free coefficient multiplying the ghost factor ``mask``."""
        return GradedPoly({(*m[:4], 0): c for m, c in self._terms.items() if m[4] == mask})

    def ghost_sectors(self) -> dict[int, GradedPoly]:
        return {mask: self.ghost_sector(mask) for mask in sorted({m[4] for m in self._terms})}

    def parity_part(self, p: int) -> GradedPoly:
        return GradedPoly({m: c for m, c in self._terms.items() if parity(m[4]) == p})

    def conj(self) -> GradedPoly:
        return GradedPoly({m: c.conjugate() for m, c in self._terms.items()})

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> GradedPoly:
        if isinstance(other, GradedPoly):
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return GradedPoly.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return GradedPoly(out)

    __radd__ = __add__

    def __neg__(self) -> GradedPoly:
        return GradedPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s: Scalar) -> GradedPoly:
        return GradedPoly({m: c * s for m, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(other)
        if not isinstance(other, GradedPoly):
            return NotImplemented
        return poly_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> GradedPoly:
        if n < 0:
            raise ValueError("negative power")
        out = GradedPoly.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def allclose(self, other: GradedPoly, tol: float = 1e-10) -> bool:
        return (self - other).max_abs() < tol

    # -- evaluation -----------------------------------------------------------
    def evaluate(self, point: Iterable[float]) -> complex:
        return evaluate(self, point)

    def evaluate_many(self, points) -> np.ndarray:
        """Evaluate a ghost-free polynomial on an ``(n, 4)`` array of points."""
        if not self.ghost_free():
            raise ValueError("cannot evaluate a ghost-bearing polynomial")
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(pts.shape[0], dtype=complex)
        for m, c in self._terms.items():
            out += c * np.prod(pts ** np.array(m[:4]), axis=1)
        return out

    # -- text form --------------------------------------------------------------
    def sorted_terms(self) -> list[tuple[Monomial, complex]]:
        return sorted(self._terms.items(), key=lambda mc: mono_key(mc[0]))

    def to_text(self) -> str:
        """Canonical text form.

        Terms are sorted graded-lexicographically and joined with ``" + "``.
        Each term is ``<re><+|-><im>i*<monomial>``, the monomial being ``1``
        or a ``*``-joined list of ``name`` / ``name^k`` factors followed by
        the ghost factor.  The zero polynomial is ``0``.
        """
        if not self._terms:
            return "0"
        out = []
        for m, c in self.sorted_terms():
            mono = format_monomial(m)
            out.append(format_coeff(c) if mono == "1" else f"{format_coeff(c)}*{mono}")
        return " + ".join(out)

    @classmethod
    def from_text(cls, text: str) -> GradedPoly:
        text = text.strip()
        if text == "0":
            return cls()
        terms: dict[Monomial, complex] = {}
        for chunk in text.split(" + "):
            match = _TERM_RE.fullmatch(chunk.strip())
            if match is None:
                raise ValueError(f"cannot parse term {chunk!r}")
            coeff = complex(float(match["re"]), float(match["sign"] + match["im"]))
            exps = [0, 0, 0, 0]
            mask = 0
            for factor in (match["mono"] or "").split("*"):
                if not factor:
                    continue
                if factor in ODD_VARS:
                    mask |= GHOST_C if factor == "C" else GHOST_P
                    continue
                name, _, power = factor.partition("^")
                exps[EVEN_VARS.index(name)] += int(power or 1)
            key = (*exps, mask)
            terms[key] = terms.get(key, 0) + coeff
        return cls(terms)

    def __repr__(self) -> str:
        return f"GradedPoly({self.to_text()!r})"


_NUM = r"[0-9]+(?:\.[0-9]*)?(?:e[+-]?[0-9]+)?|inf|nan"
_TERM_RE = re.compile(
    rf"(?P<re>-?(?:{_NUM}))(?P<sign>[+-])(?P<im>{_NUM})i(?:\*(?P<mono>[A-Za-z0-9*^]+))?"
)


def var(name: str) -> GradedPoly:
    return GradedPoly.var(name)


def poly_mul(f: GradedPoly, g: GradedPoly) -> GradedPoly:
    """Graded-commutative product with Koszul signs on the ghost factors."""
    out: dict[Monomial, complex] = {}
    for m1, c1 in f.items():
        for m2, c2 in g.items():
            m, sign = mono_mul(m1, m2)
            if m is None:
                continue
            out[m] = out.get(m, 0) + sign * c1 * c2
    return GradedPoly(out)


def deriv_monomial(m: Monomial, var: str, side: str = "left") -> tuple[Monomial | None, int]:
    """Derivative of a single monomial, returned as ``(monomial, factor)``."""
    if var in EVEN_VARS:
        i = EVEN_VARS.index(var)
        e = m[i]
        if e == 0:
            return None, 0
        new = list(m)
        new[i] -= 1
        return tuple(new), e
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    hit = _ODD_DERIV.get((var, side, m[4]))
    if hit is None:
        if var not in ODD_VARS:
            raise ValueError(f"unknown generator {var!r}")
        return None, 0
    mask, sign = hit
    return (*m[:4], mask), sign


def deriv(f: GradedPoly, var: str, side: str = "left") -> GradedPoly:
    """Partial derivative; ``side`` only matters for the odd generators."""
    out: dict[Monomial, complex] = {}
    for m, c in f.items():
        new, factor = deriv_monomial(m, var, side)
        if new is not None:
            out[new] = out.get(new, 0) + factor * c
    return GradedPoly(out)


def poisson(f: GradedPoly, g: GradedPoly) -> GradedPoly:
    """Graded Poisson bracket (see the module docstring for the convention)."""
    out = GradedPoly()
    for x, p in (("x1", "p1"), ("x2", "p2")):
        out = out + deriv(f, x) * deriv(g, p) - deriv(f, p) * deriv(g, x)
    out = out + deriv(f, "C", "right") * deriv(g, "P", "left")
    out = out + deriv(f, "P", "right") * deriv(g, "C", "left")
    return out


def evaluate(f: GradedPoly, point: Iterable[float]) -> complex:
    """Evaluate a ghost-free polynomial at ``(x1, p1, x2, p2)``."""
    pt = tuple(float(v) for v in point)
    if len(pt) != 4:
        raise ValueError("point must have 4 coordinates")
    total = 0j
    for m, c in f.items():
        if m[4]:
            raise ValueError("cannot evaluate a ghost-bearing polynomial")
        total += c * pt[0] ** m[0] * pt[1] ** m[1] * pt[2] ** m[2] * pt[3] ** m[3]
    return total


def action(i: int) -> GradedPoly:
    """Action variable ``s_i = (p_i^2 + x_i^2) / 2`` for ``i`` in ``{1, 2}``."""
    x, p = var(f"x{i}"), var(f"p{i}")
    return (x * x + p * p).scale(0.5)


def monomials_up_to(degree: int, mask: int = 0) -> list[Monomial]:
    """All even monomials of total degree ``<= degree`` with a fixed ghost factor."""
    out = []
    for total in range(degree + 1):
        for a in range(total + 1):
            for b in range(total - a + 1):
                for c in range(total - a - b + 1):
                    out.append((a, b, c, total - a - b - c, mask))
    return sorted(out, key=mono_key)
