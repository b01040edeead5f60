"""Token preimage recovery: the lattice attack on the exchange.

Given the public observables (z, p, q, m) and one token u, every preimage
x corresponds to a point (x, y) of the congruence coset inside the
rectangle 0 <= x < 2^m, 0 <= y < B2.  The attack reduces a basis of the
congruence lattice under a form weighted to make that rectangle roughly
square, enumerates the rectangle's coefficient box, and keeps exactly the
points whose x maps back to the observed token.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .errors import DegenerateInput, NoCandidates
from .lattice2d import (
    IVec2,
    WeightedForm,
    coefficient_box,
    gauss_reduce,
    rect_search,
    solution_basis,
)
from .protocol import truncate


@dataclass(frozen=True)
class AttackInput:
    """Public observables handed to the attacker.

    ``token`` is the token value u by default; with ``token_is_scaled``
    the caller passed 2^q * u (the pre-division value) and u is recovered
    as floor(token / 2^q).
    """

    z: int
    p: int
    q: int
    m: int
    token: int
    token_is_scaled: bool = False

    def token_value(self) -> int:
        return self.token >> self.q if self.token_is_scaled else self.token


@dataclass(frozen=True)
class Bounds:
    """The feasible rectangle [0, b1) x [0, b2) for preimage points."""

    b1: int
    b2: int


@dataclass(frozen=True)
class AttackResult:
    candidates: tuple[tuple[int, int], ...]
    unique: bool
    reduce_iterations: int
    searched: int
    reduce_time_ns: int
    search_time_ns: int


def bounds_for_token(u: int, q: int, m: int) -> Bounds:
    """Rectangle bounds: b1 = 2^m always; b2 = 2^q except in the corner
    case 0 < 2^m - 2^q*u < 2^q, where the tighter slack applies."""
    b1 = 1 << m
    slack = b1 - (u << q)
    b2 = slack if 0 < slack < (1 << q) else (1 << q)
    return Bounds(b1=b1, b2=b2)


def recover_preimages(inp: AttackInput) -> AttackResult:
    """Recover every preimage of the token inside the feasible rectangle.

    Deterministic in its input.  Every returned (x, y) satisfies
    truncate(x) == u exactly; ``unique`` is set when there is exactly one
    candidate.  Candidates with x = 0 are kept (x = 0 is never a valid
    secret; callers that care should flag it).
    """
    if inp.z < 1:
        raise DegenerateInput(f"z must be positive, got {inp.z}")
    if inp.p < inp.q:
        raise DegenerateInput(f"p must be at least q, got p={inp.p} q={inp.q}")
    if inp.token < 0:
        raise DegenerateInput(f"token must be nonnegative, got {inp.token}")
    u = inp.token_value()
    family = solution_basis(inp.z, inp.p, inp.q, u)
    bounds = bounds_for_token(u, inp.q, inp.m)
    form = WeightedForm.for_rectangle(bounds.b1, bounds.b2)

    t0 = time.perf_counter_ns()
    reduced, passes = gauss_reduce(family.basis(), form)
    t1 = time.perf_counter_ns()
    hits = rect_search(reduced, family.v0, bounds.b1, bounds.b2)
    t2 = time.perf_counter_ns()

    lo1, hi1, lo2, hi2 = coefficient_box(reduced, family.v0, bounds.b1, bounds.b2)
    searched = (hi1 - lo1 + 1) * (hi2 - lo2 + 1)
    candidates = tuple(
        (s.x, s.y) for s in hits if truncate(s.x, inp.z, inp.p, inp.q) == u
    )
    assert all(truncate(x, inp.z, inp.p, inp.q) == u for x, _ in candidates)
    return AttackResult(
        candidates=candidates,
        unique=len(candidates) == 1,
        reduce_iterations=passes,
        searched=searched,
        reduce_time_ns=t1 - t0,
        search_time_ns=t2 - t1,
    )


def derive_key(x: int, other_token: int, p: int, q: int, r: int, m: int) -> int:
    """The key a party with secret x derives from the peer token."""
    return ((x * other_token) & ((1 << (p - q)) - 1)) >> (r + m)


def recover_shared_key(
    inp: AttackInput,
    other_token: int,
    r: int,
    result: AttackResult | None = None,
) -> list[tuple[int, int]]:
    """Derive the shared key for every recovered preimage candidate.

    Returns (candidate x, key) pairs in candidate order; distinct
    candidates can collapse to the same key.  ``result`` may carry an
    already-computed recover_preimages output to avoid repeating the
    lattice work.  Raises NoCandidates when the candidate list is empty.
    """
    if result is None:
        result = recover_preimages(inp)
    if not result.candidates:
        raise NoCandidates("no preimage candidates to derive a key from")
    return [
        (x, derive_key(x, other_token, inp.p, inp.q, r, inp.m))
        for x, _ in result.candidates
    ]


def flag_nonpositive(result: AttackResult) -> list[int]:
    """Candidate x values that can never be honest secrets (x < 1)."""
    return [x for x, _ in result.candidates if x < 1]
