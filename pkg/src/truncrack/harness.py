"""Seeded trial runner and brute-force oracles.

Trials are independent pure computations keyed by seed: trial i of a batch
uses seed_base + i for both parameter generation and the exchange, so a
batch is reproducible record-for-record.  Records are emitted in seed
order and serialize to a fixed-schema CSV whose only run-to-run variation
is the timing columns.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .attack import AttackInput, bounds_for_token, recover_preimages, recover_shared_key
from .errors import ConstraintViolated, NoCandidates, OracleTooLarge, ToolkitError
from .protocol import ProtocolParams, exchange, gen_params, validate_params

MODES = ("attack", "exchange", "oracle-check")

# Largest m the exhaustive oracle will scan (2^24 values).
ORACLE_MAX_BITS = 24

CSV_COLUMNS = (
    "seed",
    "l",
    "m",
    "p",
    "q",
    "r",
    "secret_recovered",
    "preimage_found",
    "key_matched",
    "candidate_count",
    "reduce_iterations",
    "reduce_time_ns",
    "search_time_ns",
    "total_time_ns",
    "error",
)


@dataclass(frozen=True)
class TrialConfig:
    seed_base: int
    trials: int
    l: int
    m: int
    q: int
    r: int
    mode: str = "attack"


@dataclass
class TrialRecord:
    """One seeded end-to-end experiment row.

    ``agree`` (whether the honest parties' keys matched) is carried on the
    record for analysis but is not part of the CSV schema.
    """

    seed: int
    l: int
    m: int
    p: int
    q: int
    r: int
    secret_recovered: bool = False
    preimage_found: bool = False
    key_matched: bool = False
    candidate_count: int = 0
    reduce_iterations: int = 0
    reduce_time_ns: int = 0
    search_time_ns: int = 0
    total_time_ns: int = 0
    error: str = ""
    agree: bool = field(default=False, compare=False)


def brute_force_preimages(z: int, p: int, q: int, u: int, m: int) -> list[int]:
    """Exhaustive scan: every x in [0, 2^m) with floor((xz mod 2^p)/2^q) = u.

    Independent of the lattice machinery on purpose.  Guarded to m <= 24.
    """
    if m > ORACLE_MAX_BITS:
        raise OracleTooLarge(f"oracle limited to m <= {ORACLE_MAX_BITS}, got m={m}")
    mask = (1 << p) - 1
    return [x for x in range(1 << m) if ((x * z) & mask) >> q == u]


def _validate_config(cfg: TrialConfig) -> None:
    if cfg.trials < 1:
        raise ValueError(f"trials must be at least 1, got {cfg.trials}")
    if cfg.mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {cfg.mode!r}")
    if cfg.l < 1:
        raise ConstraintViolated("l>=1", f"l={cfg.l}")
    # Probe the derived p against the parameter constraints; the z range
    # holds for any l-bit z, so a placeholder exposes exactly the others.
    probe = ProtocolParams(
        l=cfg.l, m=cfg.m, p=cfg.l + cfg.m - cfg.q, q=cfg.q, r=cfg.r, z=1 << (cfg.l - 1)
    )
    validate_params(probe)


def _run_trial(cfg: TrialConfig, seed: int) -> TrialRecord:
    record = TrialRecord(seed=seed, l=cfg.l, m=cfg.m, p=cfg.l + cfg.m - cfg.q, q=cfg.q, r=cfg.r)
    try:
        params = gen_params(seed, cfg.l, cfg.m, cfg.q, cfg.r)
        transcript = exchange(seed, params)
        record.agree = transcript.agree
        if cfg.mode == "exchange":
            return record

        t0 = time.perf_counter_ns()
        inp = AttackInput(z=params.z, p=params.p, q=params.q, m=params.m, token=transcript.u)
        result = recover_preimages(inp)
        try:
            keys = recover_shared_key(inp, transcript.v, params.r, result=result)
        except NoCandidates:
            keys = []
        record.total_time_ns = time.perf_counter_ns() - t0

        record.candidate_count = len(result.candidates)
        record.reduce_iterations = result.reduce_iterations
        record.reduce_time_ns = result.reduce_time_ns
        record.search_time_ns = result.search_time_ns
        record.preimage_found = bool(result.candidates)
        record.secret_recovered = any(x == transcript.x for x, _ in result.candidates)
        record.key_matched = any(key == transcript.w_b for _, key in keys)

        if cfg.mode == "oracle-check":
            bounds = bounds_for_token(transcript.u, params.q, params.m)
            mask = (1 << params.p) - 1
            expected = [
                x
                for x in brute_force_preimages(params.z, params.p, params.q, transcript.u, params.m)
                if ((x * params.z) & mask) & ((1 << params.q) - 1) < bounds.b2
            ]
            got = [x for x, _ in result.candidates]
            if got != expected:
                record.error = f"oracle mismatch: got {got} expected {expected}"
    except ToolkitError as exc:
        record.error = f"{type(exc).__name__}: {exc}"
    return record


def run_trials(cfg: TrialConfig) -> list[TrialRecord]:
    """Run cfg.trials independent trials with seeds seed_base + i.

    Per-trial errors land in the record's error column; the batch never
    aborts.  An invalid config (bad trials count or parameter constraints)
    raises before any trial runs.
    """
    _validate_config(cfg)
    return [_run_trial(cfg, cfg.seed_base + i) for i in range(cfg.trials)]


def _csv_value(record: TrialRecord, column: str) -> str:
    value = getattr(record, column)
    if isinstance(value, bool):
        return "1" if value else "0"
    if column == "error":
        return str(value).replace(",", ";").replace("\n", " ")
    return str(value)


def format_csv(records: list[TrialRecord]) -> str:
    """Fixed-schema CSV; booleans as 0/1, LF line endings, trailing newline."""
    lines = [",".join(CSV_COLUMNS)]
    for record in records:
        lines.append(",".join(_csv_value(record, col) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def write_csv(records: list[TrialRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_csv(records))
