"""Truncated-modular-multiplication key exchange.

Two parties agree on public integers (l, m, p, q, r, z) where z is exactly
l bits, p + q = l + m, and p > m + q + r.  Each party picks a private m-bit
positive secret and publishes the token

    F(x) = floor((x * z mod 2^p) / 2^q),

i.e. the middle bits of x*z.  Both sides then truncate the product of their
own secret with the other token down to the bits that, up to a carry of at
most 2^-r, depend only on x*y*z.  The guard width r controls how often the
two derived keys actually agree: r > 128 is deployment grade, anything
smaller is a toy configuration kept around for tests and experiments.

All arithmetic is exact; "mod 2^k" is implemented by masking the low k bits
of a nonnegative value.  Every function here is pure and safe to call from
multiple threads.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

from .errors import ConstraintViolated

# r above this guard width counts as a deployment-grade ("full") setup.
TOY_GUARD_BITS = 128

PARAM_KEYS = ("l", "m", "p", "q", "r", "z")

_PARAM_LINE = re.compile(r"^([a-z]+)=([0-9]+)$")


@dataclass(frozen=True)
class ProtocolParams:
    """The agreed public integers.

    l, m, p, q, r are bit lengths / exponents; z is the public multiplier,
    exactly l bits long.
    """

    l: int
    m: int
    p: int
    q: int
    r: int
    z: int


@dataclass(frozen=True)
class ExchangeTranscript:
    """Everything produced by one seeded exchange, secrets included."""

    x: int
    y: int
    u: int
    v: int
    w_a: int
    w_b: int
    agree: bool


def classify(params: ProtocolParams) -> str:
    """Return "full" for deployment-grade r, "toy" otherwise."""
    return "full" if params.r > TOY_GUARD_BITS else "toy"


def validate_params(params: ProtocolParams) -> str:
    """Check every parameter constraint; return the toy/full classification.

    Raises ConstraintViolated naming the first inequality that fails.
    """
    for name in ("l", "m", "p", "q", "r"):
        if getattr(params, name) < 1:
            raise ConstraintViolated(f"{name}>=1", f"{name}={getattr(params, name)}")
    if not (1 << (params.l - 1)) <= params.z < (1 << params.l):
        raise ConstraintViolated("2^(l-1)<=z<2^l", f"z={params.z} is not exactly {params.l} bits")
    if params.p + params.q != params.l + params.m:
        raise ConstraintViolated("p+q=l+m", f"{params.p}+{params.q} != {params.l}+{params.m}")
    if params.p <= params.m + params.q + params.r:
        raise ConstraintViolated(
            "p>m+q+r", f"{params.p} <= {params.m}+{params.q}+{params.r}"
        )
    return classify(params)


def gen_params(seed: int, l: int, m: int, q: int, r: int) -> ProtocolParams:
    """Derive p = l + m - q and draw z uniformly from [2^(l-1), 2^l).

    The draw is deterministic in ``seed``; the result always passes
    validate_params or the constraint error is raised.
    """
    if l < 1:
        raise ConstraintViolated("l>=1", f"l={l}")
    rng = random.Random(seed)
    z = (1 << (l - 1)) | rng.getrandbits(l - 1)
    params = ProtocolParams(l=l, m=m, p=l + m - q, q=q, r=r, z=z)
    validate_params(params)
    return params


def truncate(x: int, z: int, p: int, q: int) -> int:
    """floor((x * z mod 2^p) / 2^q) for nonnegative x."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    return ((x * z) & ((1 << p) - 1)) >> q


def trunc_f(x: int, params: ProtocolParams) -> int:
    """The public token map F(x) = floor((x*z mod 2^p) / 2^q)."""
    return truncate(x, params.z, params.p, params.q)


def trunc_remainder(x: int, params: ProtocolParams) -> tuple[int, int]:
    """Split x*z mod 2^p into (token u, low bits y) with 0 <= y < 2^q."""
    masked = (x * params.z) & ((1 << params.p) - 1)
    return masked >> params.q, masked & ((1 << params.q) - 1)


def shared_key(x: int, other_token: int, params: ProtocolParams) -> int:
    """floor((x * v mod 2^(p-q)) / 2^(r+m)) where v is the peer's token."""
    mask = (1 << (params.p - params.q)) - 1
    return ((x * other_token) & mask) >> (params.r + params.m)


def sample_secret(rng: random.Random, m: int) -> int:
    """Uniform draw from [1, 2^m) — an m-bit positive secret."""
    while True:
        x = rng.getrandbits(m)
        if x:
            return x


def exchange(seed: int, params: ProtocolParams) -> ExchangeTranscript:
    """Run one full seeded exchange and report whether the keys agreed.

    Secrets x and y are drawn deterministically from ``seed``; identical
    seed and params give an identical transcript.  Agreement is recorded,
    never assumed: at toy guard widths the keys routinely differ.
    """
    validate_params(params)
    rng = random.Random(seed)
    x = sample_secret(rng, params.m)
    y = sample_secret(rng, params.m)
    u = trunc_f(x, params)
    v = trunc_f(y, params)
    w_a = shared_key(x, v, params)
    w_b = shared_key(y, u, params)
    return ExchangeTranscript(x=x, y=y, u=u, v=v, w_a=w_a, w_b=w_b, agree=w_a == w_b)


def dump_params(params: ProtocolParams) -> str:
    """Serialize to the key=value parameter file format."""
    return "".join(f"{key}={getattr(params, key)}\n" for key in PARAM_KEYS)


def parse_params(text: str) -> ProtocolParams:
    """Parse the key=value format: decimal values, no spaces, keys exactly
    l,m,p,q,r,z each once.  Unknown keys are rejected."""
    values: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        match = _PARAM_LINE.match(line)
        if not match:
            raise ValueError(f"line {lineno}: malformed parameter line {line!r}")
        key, value = match.group(1), match.group(2)
        if key not in PARAM_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        values[key] = int(value)
    missing = [key for key in PARAM_KEYS if key not in values]
    if missing:
        raise ValueError(f"missing keys: {', '.join(missing)}")
    return ProtocolParams(**values)


def save_params(params: ProtocolParams, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_params(params))


def load_params(path: str) -> ProtocolParams:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_params(fh.read())
