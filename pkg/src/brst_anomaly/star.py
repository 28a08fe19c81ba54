"""Wick-type and Weyl star products on the extended phase space.

The product is the exponential bidifferential formula

    F * G = F exp( hbar <d_A W^{AB} d_B> + GHOST_WEIGHT hbar <d_C| |d_P> ) G

with the left arrows acting on ``F`` and the right arrows on ``G``.  The
odd factor uses the right ``C`` derivative of ``F`` and the left ``P``
derivative of ``G``; it squares to zero, so it contributes at most one
power of hbar.  ``D_k`` is built by contracting k times with ``W`` (and
k - 1 times plus once with the ghost factor), divided by the factorial.

``GHOST_WEIGHT`` is ``i``: with it the first-order antisymmetrization
equals ``i`` times the graded Poisson bracket in every ghost sector,
matching the even sector where ``W - W^T = i J``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .graded import (
    EVEN_VARS,
    GHOST_C,
    GHOST_P,
    GradedPoly,
    Monomial,
    deriv_monomial,
    mono_mul,
    poisson,
)
from .series import HbarSeries

GHOST_WEIGHT = 1j

# canonical Poisson tensor J^{AB} on (x1, p1, x2, p2)
SYMPLECTIC = np.array(
    [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], dtype=complex
)


@dataclass(frozen=True)
class SchemeSpec:
    """A star-product scheme.

    ``kind="wick"`` uses the block matrix built from the nonzero reals
    ``alpha`` and ``beta``; ``kind="weyl"`` uses ``(i/2) J``.
    """

    kind: Literal["wick", "weyl"]
    alpha: float = 1.0
    beta: float = 1.0
    W: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "wick":
            if self.alpha == 0 or self.beta == 0:
                raise ValueError("alpha and beta must be nonzero")
            a, b = float(self.alpha), float(self.beta)
            W = 0.5 * np.array(
                [
                    [a, 1j, 0, 0],
                    [-1j, 1 / a, 0, 0],
                    [0, 0, b, 1j],
                    [0, 0, -1j, 1 / b],
                ],
                dtype=complex,
            )
        elif self.kind == "weyl":
            W = 0.5j * SYMPLECTIC
        else:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        W.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(
            self, "_entries", tuple((A, B, complex(W[A, B])) for A in range(4) for B in range(4) if W[A, B] != 0)
        )

    def label(self) -> str:
        return "weyl" if self.kind == "weyl" else f"wick(alpha={self.alpha!r}, beta={self.beta!r})"

    def left_kernel(self) -> np.ndarray:
        """One-forms ``i dx_i - alpha dp_i`` annihilated by W.

        Rows are covectors ``lam_B``; the kernel property is
        ``W^{AB} lam_B = 0``, i.e. ``W @ lam.T == 0``.
        """
        if self.kind != "wick":
            return np.zeros((0, 4), dtype=complex)
        return np.array(
            [[1j, -self.alpha, 0, 0], [0, 0, 1j, -self.beta]], dtype=complex
        )

    def to_dict(self) -> dict:
        if self.kind == "weyl":
            return {"kind": "weyl"}
        return {"kind": "wick", "alpha": self.alpha, "beta": self.beta}


def wick(alpha: float, beta: float) -> SchemeSpec:
    return SchemeSpec("wick", alpha, beta)


def weyl() -> SchemeSpec:
    return SchemeSpec("weyl")


# -- bidifferential expansion ------------------------------------------------

_Pairs = dict[tuple[Monomial, Monomial], complex]


def _contract_even(pairs: _Pairs, entries, divisor: int) -> _Pairs:
    out: _Pairs = {}
    for (m1, m2), c in pairs.items():
        for A, B, w in entries:
            e1, e2 = m1[A], m2[B]
            if not e1 or not e2:
                continue
            n1 = m1[:A] + (e1 - 1,) + m1[A + 1:]
            n2 = m2[:B] + (e2 - 1,) + m2[B + 1:]
            key = (n1, n2)
            out[key] = out.get(key, 0) + c * w * e1 * e2 / divisor
    return out


def _contract_ghost(pairs: _Pairs) -> _Pairs:
    out: _Pairs = {}
    for (m1, m2), c in pairs.items():
        if not (m1[4] & GHOST_C and m2[4] & GHOST_P):
            continue
        n1, s1 = deriv_monomial(m1, "C", "right")
        n2, s2 = deriv_monomial(m2, "P", "left")
        key = (n1, n2)
        out[key] = out.get(key, 0) + c * s1 * s2 * GHOST_WEIGHT
    return out


def _multiply(pairs: _Pairs) -> GradedPoly:
    out: dict[Monomial, complex] = {}
    for (m1, m2), c in pairs.items():
        m, sign = mono_mul(m1, m2)
        if m is not None:
            out[m] = out.get(m, 0) + sign * c
    return GradedPoly(out)


def bidiff_terms(F: GradedPoly, G: GradedPoly, scheme: SchemeSpec, max_order: int) -> list[GradedPoly]:
    """``[D_0(F, G), ..., D_max_order(F, G)]`` with ``D_0`` the graded product."""
    pairs: _Pairs = {(m1, m2): c1 * c2 for m1, c1 in F.items() for m2, c2 in G.items()}
    even = [pairs]
    for j in range(1, max_order + 1):
        if not even[-1]:
            break
        even.append(_contract_even(even[-1], scheme._entries, j))
    out = []
    for k in range(max_order + 1):
        level = dict(even[k]) if k < len(even) else {}
        if 1 <= k <= len(even):
            for key, c in _contract_ghost(even[k - 1]).items():
                level[key] = level.get(key, 0) + c
        out.append(_multiply(level))
    return out


def extract_dk(F: GradedPoly, G: GradedPoly, k: int, scheme: SchemeSpec) -> GradedPoly:
    """Coefficient of ``hbar^k`` in ``F * G``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return bidiff_terms(F, G, scheme, k)[k]


def star(F: HbarSeries, G: HbarSeries, scheme: SchemeSpec) -> HbarSeries:
    if F.order != G.order:
        raise ValueError(f"truncation order mismatch: {F.order} vs {G.order}")
    N = F.order
    out = [GradedPoly() for _ in range(N + 1)]
    for i, Fi in enumerate(F.coeffs):
        if Fi.is_zero():
            continue
        for j, Gj in enumerate(G.coeffs[: N - i + 1]):
            if Gj.is_zero():
                continue
            for k, Dk in enumerate(bidiff_terms(Fi, Gj, scheme, N - i - j)):
                out[i + j + k] = out[i + j + k] + Dk
    return HbarSeries(out, N)


def _as_series(F, order: int | None = None) -> HbarSeries:
    if isinstance(F, HbarSeries):
        return F
    return HbarSeries.from_poly(F, order or 4)


def star_commutator(F: HbarSeries, G: HbarSeries, scheme: SchemeSpec) -> HbarSeries:
    """Graded commutator ``F*G - (-1)^{|F||G|} G*F``.

    Mixed-parity arguments are split into homogeneous parts; at least one
    argument must have definite parity.
    """
    pF, pG = F.parity(), G.parity()
    if pF is None and pG is None:
        raise ValueError("graded commutator needs at least one argument of definite parity")
    out = HbarSeries([], F.order)
    for a in (0, 1):
        Fa = F.parity_part(a)
        if Fa.is_zero():
            continue
        for b in (0, 1):
            Gb = G.parity_part(b)
            if Gb.is_zero():
                continue
            sign = -1 if a * b else 1
            out = out + star(Fa, Gb, scheme) - star(Gb, Fa, scheme).scale(sign)
    return out


# -- property checks -----------------------------------------------------------

def random_poly(rng: random.Random, degree_cap: int, n_terms: int = 4, ghosts: bool = True,
                integer: bool = False) -> GradedPoly:
    """Random polynomial with at most ``n_terms`` terms, all ghost sectors allowed."""
    terms: dict[Monomial, complex] = {}
    masks = (0, GHOST_C, GHOST_P, GHOST_C | GHOST_P) if ghosts else (0,)
    for _ in range(n_terms):
        deg = rng.randint(0, degree_cap)
        exps = [0, 0, 0, 0]
        for _ in range(deg):
            exps[rng.randrange(4)] += 1
        if integer:
            c = complex(rng.randint(-3, 3), rng.randint(-3, 3))
        else:
            c = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        key = (*exps, rng.choice(masks))
        terms[key] = terms.get(key, 0) + c
    return GradedPoly(terms)


def random_homogeneous(rng: random.Random, degree_cap: int, n_terms: int = 4, ghosts: bool = True) -> GradedPoly:
    """Random polynomial of definite Grassmann parity."""
    p = random_poly(rng, degree_cap, n_terms, ghosts)
    parity = rng.randrange(2) if ghosts else 0
    return p.parity_part(parity) if not p.parity_part(parity).is_zero() else p.parity_part(1 - parity)


def check_associativity(samples: int, degree_cap: int, scheme: SchemeSpec, order: int = 4,
                        seed: int = 0, ghosts: bool = True) -> float:
    """Max coefficient of ``(F*G)*K - F*(G*K)`` over random triples."""
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(samples):
        F, G, K = (HbarSeries.from_poly(random_poly(rng, degree_cap, ghosts=ghosts), order) for _ in range(3))
        lhs = star(star(F, G, scheme), K, scheme)
        rhs = star(F, star(G, K, scheme), scheme)
        worst = max(worst, (lhs - rhs).max_abs())
    return worst


def d1_residual(F: GradedPoly, G: GradedPoly, scheme: SchemeSpec) -> float:
    """Residual of ``D_1(F,G) - (-1)^{|F||G|} D_1(G,F) - i{F,G}`` for homogeneous F, G."""
    pF, pG = F.parity(), G.parity()
    if pF is None or pG is None:
        raise ValueError("D_1 identity needs homogeneous arguments")
    sign = -1 if pF * pG else 1
    lhs = extract_dk(F, G, 1, scheme) - extract_dk(G, F, 1, scheme).scale(sign)
    return (lhs - poisson(F, G).scale(1j)).max_abs()


def check_d1(samples: int, degree_cap: int, scheme: SchemeSpec, seed: int = 0) -> float:
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(samples):
        F = random_homogeneous(rng, degree_cap)
        G = random_homogeneous(rng, degree_cap)
        worst = max(worst, d1_residual(F, G, scheme))
    return worst


def check_weyl_symmetry(samples: int, degree_cap: int, max_order: int = 4, seed: int = 0) -> float:
    """Max of ``|D_k(F,G) - (-1)^k D_k(G,F)|`` for ghost-free F, G in the Weyl scheme."""
    rng = random.Random(seed)
    scheme = weyl()
    worst = 0.0
    for _ in range(samples):
        F = random_poly(rng, degree_cap, ghosts=False)
        G = random_poly(rng, degree_cap, ghosts=False)
        fg = bidiff_terms(F, G, scheme, max_order)
        gf = bidiff_terms(G, F, scheme, max_order)
        for k in range(max_order + 1):
            worst = max(worst, (fg[k] - gf[k].scale((-1) ** k)).max_abs())
    return worst


__all__ = [
    "EVEN_VARS",
    "GHOST_WEIGHT",
    "SchemeSpec",
    "bidiff_terms",
    "check_associativity",
    "check_d1",
    "check_weyl_symmetry",
    "extract_dk",
    "star",
    "star_commutator",
    "weyl",
    "wick",
]
