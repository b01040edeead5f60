"""Exact rank-2 lattice machinery for the token congruence.

The congruence lattice for a public multiplier z and modulus 2^p is

    L = { (x, y) : x*z = y  (mod 2^p) },

a rank-2 sublattice of Z^2 with determinant 2^p.  Recovering a token
preimage means finding the solutions of the inhomogeneous congruence
x*z = 2^q*u + y (mod 2^p) inside a small rectangle, which this module
does with a particular solution plus L, a weighted Lagrange (Gauss)
reduction of a basis of L, exact rational coefficient solving, rounding,
and a bounded enumeration of the rectangle's coefficient box.

Everything is exact: integers and fractions only, no floating point.
Decimal strings shown to humans are truncated from exact rationals.
All functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .errors import (
    DegenerateInput,
    IterationCapExceeded,
    SearchSpaceExceeded,
    SingularBasis,
)


@dataclass(frozen=True)
class IVec2:
    """An exact integer column vector (x, y)."""

    x: int
    y: int

    def __add__(self, other: "IVec2") -> "IVec2":
        return IVec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "IVec2") -> "IVec2":
        return IVec2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "IVec2":
        return IVec2(-self.x, -self.y)

    def scaled(self, k: int) -> "IVec2":
        return IVec2(k * self.x, k * self.y)


@dataclass(frozen=True)
class WeightedForm:
    """Positive definite bilinear form  <a, b> = wx*ax*bx + wy*ay*by.

    For rectangle bounds (B1, B2) the weights are wx = B2^2, wy = B1^2:
    this is the inner product with y scaled by (B1/B2)^2, multiplied
    through by B2^2 so every value stays an exact integer.  The common
    scaling changes no ratio, rounding, or argmin computed from the form.
    """

    wx: int
    wy: int

    def __post_init__(self):
        if self.wx <= 0 or self.wy <= 0:
            raise ValueError("form weights must be positive")

    @classmethod
    def for_rectangle(cls, b1: int, b2: int) -> "WeightedForm":
        return cls(wx=b2 * b2, wy=b1 * b1)

    def inner(self, a: IVec2, b: IVec2) -> int:
        return self.wx * a.x * b.x + self.wy * a.y * b.y

    def norm_sq(self, a: IVec2) -> int:
        return self.wx * a.x * a.x + self.wy * a.y * a.y


@dataclass(frozen=True)
class LatticeBasis:
    """An ordered basis (u1, u2) of the congruence lattice mod 2^modulus_exp.

    Both vectors satisfy v.x*z = v.y (mod 2^modulus_exp) and the
    determinant is +-2^modulus_exp; z is carried alongside so membership
    stays checkable.
    """

    u1: IVec2
    u2: IVec2
    modulus_exp: int
    z: int

    def det(self) -> int:
        return self.u1.x * self.u2.y - self.u1.y * self.u2.x

    def contains(self, v: IVec2) -> bool:
        return (v.x * self.z - v.y) % (1 << self.modulus_exp) == 0

    def is_reduced(self, form: WeightedForm) -> bool:
        cross = abs(form.inner(self.u1, self.u2))
        return 2 * cross <= min(form.norm_sq(self.u1), form.norm_sq(self.u2))


@dataclass(frozen=True)
class SolutionFamily:
    """All solutions of x*z = 2^q*u + y (mod 2^p): the coset v0 + L.

    v0 is a particular solution; g1, g2 generate the homogeneous lattice L.
    """

    v0: IVec2
    g1: IVec2
    g2: IVec2
    modulus_exp: int
    z: int

    def basis(self) -> LatticeBasis:
        return LatticeBasis(u1=self.g1, u2=self.g2, modulus_exp=self.modulus_exp, z=self.z)


@dataclass(frozen=True)
class ReductionStep:
    """State after one half-step of the reduction; target names the vector
    that was just replaced."""

    target: str
    c: int
    u1: IVec2
    u2: IVec2


def solution_basis(z: int, p: int, q: int, u: int, *, proof_variant: bool = False) -> SolutionFamily:
    """Particular solution and lattice generators for the token congruence.

    v0 = (ceil(2^q*u / z), z*x0 - 2^q*u) solves the congruence with
    0 <= y0 < z.  The generators are the consecutive pair
    g_i = (t + i, z*(t + i) - 2^p) for i in {0, 1}, which both satisfy the
    homogeneous congruence and span a determinant-2^p sublattice, i.e. all
    of L.  By default t = floor(2^q*u / z); with ``proof_variant`` the
    anchor t = floor(2^p / z) is used instead (a diagnostic alternative
    that generates the same lattice).
    """
    if z <= 0:
        raise DegenerateInput(f"z must be positive, got {z}")
    if p < 1:
        raise DegenerateInput(f"p must be at least 1, got {p}")
    if u < 0:
        raise DegenerateInput(f"u must be nonnegative, got {u}")
    shifted = u << q
    x0 = -(-shifted // z)
    v0 = IVec2(x0, z * x0 - shifted)
    anchor = ((1 << p) // z) if proof_variant else (shifted // z)
    modulus = 1 << p
    g1 = IVec2(anchor, z * anchor - modulus)
    g2 = IVec2(anchor + 1, z * (anchor + 1) - modulus)
    return SolutionFamily(v0=v0, g1=g1, g2=g2, modulus_exp=p, z=z)


def _round_quotient_half_to_zero(num: int, den: int) -> int:
    """Nearest integer to num/den (den > 0); exact halves go toward zero."""
    quot, rem = divmod(num, den)
    doubled = 2 * rem
    if doubled > den:
        return quot + 1
    if doubled < den:
        return quot
    # Exactly halfway: quot + 1/2.  Toward zero means down for positive
    # values, up for negative ones.
    return quot if quot >= 0 else quot + 1


def round_half_to_zero(value: Fraction | int) -> int:
    """Round to the nearest integer, sending exact halves toward zero.

    +-1/2 -> 0,  3/2 -> 1,  -3/2 -> -1.  Integer arithmetic only.
    """
    if isinstance(value, int):
        return value
    return _round_quotient_half_to_zero(value.numerator, value.denominator)


def gauss_reduce(
    basis: LatticeBasis,
    form: WeightedForm,
    *,
    on_step: Optional[Callable[[ReductionStep], None]] = None,
) -> tuple[LatticeBasis, int]:
    """Lagrange-reduce the basis under the weighted form.

    Alternately replaces u1 <- u1 - c1*u2 and u2 <- u2 - c2*u1 with
    c = Round(<ui, uj> / <uj, uj>) (halves toward zero) until a pass leaves
    both coefficients zero.  On exit |<u1,u2>| <= min(|u1|^2, |u2|^2) / 2.

    Returns the reduced basis and the number of passes, counting the final
    all-zero pass.  Each half-step preserves the determinant and, whenever
    c != 0, strictly shrinks the replaced vector's norm; both facts are
    asserted.  ``on_step`` (if given) observes the state after every
    half-step.  The pass count is capped at 64 * modulus_exp as a safety
    net; reduction converges orders of magnitude faster.
    """
    u1, u2 = basis.u1, basis.u2
    det = basis.det()
    if det == 0:
        raise DegenerateInput("basis is degenerate (determinant 0)")
    cap = 64 * basis.modulus_exp
    passes = 0
    while True:
        passes += 1
        if passes > cap:
            raise IterationCapExceeded(
                f"reduction exceeded {cap} passes (modulus_exp={basis.modulus_exp})"
            )
        old_norm1 = form.norm_sq(u1)
        c1 = _round_quotient_half_to_zero(form.inner(u1, u2), form.norm_sq(u2))
        u1 = u1 - u2.scaled(c1)
        assert abs(u1.x * u2.y - u1.y * u2.x) == abs(det)
        assert c1 == 0 or form.norm_sq(u1) < old_norm1
        if on_step is not None:
            on_step(ReductionStep(target="u1", c=c1, u1=u1, u2=u2))

        old_norm2 = form.norm_sq(u2)
        c2 = _round_quotient_half_to_zero(form.inner(u1, u2), form.norm_sq(u1))
        u2 = u2 - u1.scaled(c2)
        assert abs(u1.x * u2.y - u1.y * u2.x) == abs(det)
        assert c2 == 0 or form.norm_sq(u2) < old_norm2
        if on_step is not None:
            on_step(ReductionStep(target="u2", c=c2, u1=u1, u2=u2))

        if c1 == 0 and c2 == 0:
            break
    reduced = LatticeBasis(u1=u1, u2=u2, modulus_exp=basis.modulus_exp, z=basis.z)
    assert reduced.is_reduced(form)
    return reduced, passes


def solve_coeffs(basis: LatticeBasis, v: IVec2) -> tuple[Fraction, Fraction]:
    """Exact rationals (a1, a2) with a1*u1 + a2*u2 = v (Cramer's rule).

    Denominators always divide |det| = 2^modulus_exp.
    """
    det = basis.det()
    if det == 0:
        raise SingularBasis("cannot solve coefficients: determinant is 0")
    a1 = Fraction(v.x * basis.u2.y - basis.u2.x * v.y, det)
    a2 = Fraction(basis.u1.x * v.y - v.x * basis.u1.y, det)
    return a1, a2


# Probe order for the local minimality fix-up: the rounded pair first,
# then its neighbours in a fixed order so ties resolve deterministically.
_NEIGHBOURHOOD = [(0, 0)] + [(e1, e2) for e1 in (-1, 0, 1) for e2 in (-1, 0, 1) if (e1, e2) != (0, 0)]


def nearest_lattice_point(
    basis: LatticeBasis,
    v: IVec2,
    form: WeightedForm,
    *,
    mode: str = "round",
) -> tuple[int, int]:
    """Integer coefficients (a1, a2) whose lattice point is nearest v.

    ``basis`` must be reduced under ``form``.  The coefficients are the
    rounded (halves toward zero) exact solve of v in the basis; because a
    coefficient sitting close to a half-integer boundary can make a
    neighbouring pair strictly closer under a skew form, the 3x3
    neighbourhood of the rounded pair is scanned and the best kept.  For a
    reduced basis the true closest point always lies in that
    neighbourhood, so the result attains the exact minimum of the form
    norm over the coset v + L.

    ``mode="floor"`` skips rounding and refinement and returns the floored
    coefficients unchanged (a diagnostic, deliberately not minimal).
    """
    a1, a2 = solve_coeffs(basis, v)
    if mode == "floor":
        return math.floor(a1), math.floor(a2)
    if mode != "round":
        raise ValueError(f"unknown mode {mode!r}")
    r1 = _round_quotient_half_to_zero(a1.numerator, a1.denominator)
    r2 = _round_quotient_half_to_zero(a2.numerator, a2.denominator)
    best = None
    best_norm = None
    for e1, e2 in _NEIGHBOURHOOD:
        c1, c2 = r1 + e1, r2 + e2
        residual = v - basis.u1.scaled(c1) - basis.u2.scaled(c2)
        norm = form.norm_sq(residual)
        if best_norm is None or norm < best_norm:
            best, best_norm = (c1, c2), norm
    return best


def coefficient_box(
    basis: LatticeBasis, v: IVec2, b1: int, b2: int
) -> tuple[int, int, int, int]:
    """Inclusive integer coefficient ranges covering the target rectangle.

    Solves the four corners v, v-(b1,0), v-(0,b2), v-(b1,b2) exactly and
    returns the bounding box of their coefficients, padded by 1 on each
    side to absorb the half-open edges of the rectangle.
    """
    corners = [
        v,
        IVec2(v.x - b1, v.y),
        IVec2(v.x, v.y - b2),
        IVec2(v.x - b1, v.y - b2),
    ]
    coeffs = [solve_coeffs(basis, corner) for corner in corners]
    a1s = [c[0] for c in coeffs]
    a2s = [c[1] for c in coeffs]
    return (
        math.floor(min(a1s)) - 1,
        math.ceil(max(a1s)) + 1,
        math.floor(min(a2s)) - 1,
        math.ceil(max(a2s)) + 1,
    )


def rect_search(
    basis: LatticeBasis,
    v: IVec2,
    b1: int,
    b2: int,
    cap: int = 1 << 20,
) -> list[IVec2]:
    """All points of the coset v + L inside [0, b1) x [0, b2), sorted by x.

    Enumerates every integer coefficient pair in the padded corner box and
    keeps s = v - a1*u1 - a2*u2 whenever s lands in the rectangle.  The
    rectangle's image in coefficient space is a parallelogram contained in
    that box, so no in-rectangle point can be missed.  ``basis`` should be
    reduced; an unreduced basis only makes the box larger.

    Raises SearchSpaceExceeded when the box holds more than ``cap`` pairs.
    """
    if b1 < 1 or b2 < 1:
        raise ValueError("rectangle bounds must be at least 1")
    lo1, hi1, lo2, hi2 = coefficient_box(basis, v, b1, b2)
    pairs = (hi1 - lo1 + 1) * (hi2 - lo2 + 1)
    if pairs > cap:
        raise SearchSpaceExceeded(f"coefficient box holds {pairs} pairs (cap {cap})")
    hits: list[IVec2] = []
    for a1 in range(lo1, hi1 + 1):
        base = v - basis.u1.scaled(a1)
        for a2 in range(lo2, hi2 + 1):
            s = base - basis.u2.scaled(a2)
            if 0 <= s.x < b1 and 0 <= s.y < b2:
                hits.append(s)
    hits.sort(key=lambda s: s.x)
    return hits


def truncate_decimal(value: Fraction, places: int = 3) -> str:
    """Format an exact rational as a decimal truncated toward zero."""
    sign = "-" if value < 0 else ""
    magnitude = -value if value < 0 else value
    scaled = magnitude * 10**places
    digits = scaled.numerator // scaled.denominator
    whole, frac = divmod(digits, 10**places)
    return f"{sign}{whole}.{frac:0{places}d}"
