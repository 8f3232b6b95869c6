"""Incremental S_1(z), H_1(z), pi(z) streams and the large-range verification campaign.

The campaign checks, for every integer z in [z_min, z_max) and Y in
{4z^2, 4(z+1)^2},

    Y / S_1(z) + H_1(z)^2 / S_1(z)^2 + pi(z) < 2Y / log(Y).

Since t -> t/log(t) is concave for t > e^2 while the left side is linear in
Y for fixed z, checking both endpoints covers every Y in [4z^2, 4(z+1)^2].

Sums are accumulated block by block. Each block is summed on its own with
Neumaier compensation and then added to the running double-double state,
so results do not depend on how many threads computed the blocks.
"""

from __future__ import annotations

import json
import logging
import math
import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterator

import numpy as np

from . import _kernels
from .arith_tab import DEFAULT_SEGMENT_LENGTH, base_primes_for, compute_segment
from .errors import PreconditionError
from .reports import SCHEMA_VERSION, BoundReport

log = logging.getLogger(__name__)

SWEEP_Z_MIN = 50
QUICK_Z_MAX = 2 * 10**6
FULL_Z_MAX = 2 * 10**9
DEFAULT_CHECKPOINT_STRIDE = 10**7
MARGIN_SLACK = 1e-6
DRIFT_TOLERANCE = 1e-9
MAX_LISTED = 100


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def dd_add(a_hi, a_lo, b_hi, b_lo):
    """Double-double addition; works elementwise on numpy arrays."""
    s, e = _two_sum(a_hi, b_hi)
    e = e + (a_lo + b_lo)
    hi = s + e
    return hi, e - (hi - s)


@dataclass
class SweepState:
    """Running sums after processing every n <= z (z = 0 before anything is processed)."""

    z: int = 0
    S1: float = 0.0
    S1_compensation: float = 0.0
    H1: float = 0.0
    H1_compensation: float = 0.0
    piz: int = 0

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class BlockPrefix:
    """S_1, H_1 (double-double) and pi at every z in [base, base + length)."""

    base: int
    S_hi: np.ndarray
    S_lo: np.ndarray
    H_hi: np.ndarray
    H_lo: np.ndarray
    pi: np.ndarray
    fresh_S: float  # plain pairwise sum of this block's terms, for drift checks
    fresh_H: float

    @property
    def z(self) -> np.ndarray:
        return np.arange(self.base, self.base + len(self.S_hi), dtype=np.int64)


@dataclass
class _LocalBlock:
    base: int
    S_hi: np.ndarray
    S_lo: np.ndarray
    H_hi: np.ndarray
    H_lo: np.ndarray
    primes: np.ndarray
    fresh_S: float
    fresh_H: float


def _local_block(base: int, length: int, primes: np.ndarray) -> _LocalBlock:
    seg = compute_segment(base, length, primes)
    squarefree = seg.mu != 0
    phi = seg.phi.astype(np.float64)
    ts = np.where(squarefree, 1.0 / phi, 0.0)
    th = np.where(squarefree, seg.sigma.astype(np.float64) / phi, 0.0)
    s_hi, s_lo = _kernels.neumaier_prefix(ts)
    h_hi, h_lo = _kernels.neumaier_prefix(th)
    prime_prefix = np.cumsum(seg.is_prime, dtype=np.int64)
    return _LocalBlock(base, s_hi, s_lo, h_hi, h_lo, prime_prefix, float(ts.sum()), float(th.sum()))


def block_bounds(
    start: int, end: int, segment_length: int, cut_every: int | None = None
) -> list[tuple[int, int]]:
    """Blocks covering [start, end], aligned to 1 + j * segment_length.

    With ``cut_every``, blocks additionally end at every multiple of it.
    """
    out = []
    base = start
    while base <= end:
        block_end = min(end, base + segment_length - 1 - (base - 1) % segment_length)
        if cut_every:
            block_end = min(block_end, -(-base // cut_every) * cut_every)
        out.append((base, block_end - base + 1))
        base = block_end + 1
    return out


def stream_prefix(
    z_max: int,
    *,
    state: SweepState | None = None,
    segment_length: int = DEFAULT_SEGMENT_LENGTH,
    threads: int = 1,
    cut_every: int | None = None,
) -> Iterator[BlockPrefix]:
    """Yield prefix sums for z = state.z + 1 .. z_max, one aligned block at a time.

    ``state`` is advanced in place as blocks are yielded.
    """
    state = state if state is not None else SweepState()
    if z_max <= state.z:
        return
    bounds = block_bounds(state.z + 1, z_max, segment_length, cut_every)
    primes = base_primes_for(z_max)

    def consume(local: _LocalBlock) -> BlockPrefix:
        s_hi, s_lo = dd_add(state.S1, state.S1_compensation, local.S_hi, local.S_lo)
        h_hi, h_lo = dd_add(state.H1, state.H1_compensation, local.H_hi, local.H_lo)
        pi = state.piz + local.primes
        state.z = local.base + len(local.S_hi) - 1
        state.S1, state.S1_compensation = float(s_hi[-1]), float(s_lo[-1])
        state.H1, state.H1_compensation = float(h_hi[-1]), float(h_lo[-1])
        state.piz = int(pi[-1])
        return BlockPrefix(local.base, s_hi, s_lo, h_hi, h_lo, pi, local.fresh_S, local.fresh_H)

    if threads <= 1:
        for base, length in bounds:
            yield consume(_local_block(base, length, primes))
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        pending: deque = deque()
        it = iter(bounds)
        for base, length in it:
            pending.append(pool.submit(_local_block, base, length, primes))
            if len(pending) >= 2 * threads:
                break
        while pending:
            local = pending.popleft().result()
            nxt = next(it, None)
            if nxt is not None:
                pending.append(pool.submit(_local_block, nxt[0], nxt[1], primes))
            yield consume(local)


def prefix_values(z_max: int, segment_length: int = DEFAULT_SEGMENT_LENGTH):
    """S_1(z), H_1(z), pi(z) for z = 1..z_max as three arrays (index z - 1)."""
    parts = list(stream_prefix(z_max, segment_length=segment_length))
    return (
        np.concatenate([p.S_hi for p in parts]),
        np.concatenate([p.H_hi for p in parts]),
        np.concatenate([p.pi for p in parts]),
    )


# -- the inequality ----------------------------------------------------------


def test_inequality(
    Y: float, S1: float, H1: float, piz: int, *, slack_rel: float = MARGIN_SLACK
) -> BoundReport:
    """Y/S1 + H1^2/S1^2 + piz < 2Y/log(Y), passing only with margin above slack_rel * rhs."""
    if not Y > 1:
        raise PreconditionError(f"need Y > 1, got {Y}")
    if not S1 > 0:
        raise PreconditionError(f"need S1 > 0, got {S1}")
    lhs = Y / S1 + (H1 / S1) ** 2 + piz
    rhs = 2 * Y / math.log(Y)
    return BoundReport.compare(
        "sweep inequality",
        lhs,
        rhs,
        strict=True,
        slack=slack_rel * rhs,
        params={"Y": Y, "S1": S1, "H1": H1, "piz": piz},
    )


test_inequality.__test__ = False  # not a pytest test


def inequality_margins(Y: np.ndarray, S: np.ndarray, H: np.ndarray, pi: np.ndarray):
    """Vectorized (lhs, rhs) of the sweep inequality."""
    lhs = Y / S + (H / S) ** 2 + pi
    rhs = 2.0 * Y / np.log(Y)
    return lhs, rhs


def concavity_metadata(z_min: int) -> dict[str, Any]:
    """The analytic fact that licenses checking only the endpoints of each Y-interval."""
    y_min = 4.0 * z_min * z_min
    return {
        "function": "t / log(t)",
        "second_derivative": "(2 - log t) / (t log(t)^3)",
        "concave_for_t_greater_than": math.e**2,
        "smallest_Y_checked": y_min,
        "applies": y_min > math.e**2,
    }


def concavity_holds(t0: float, t1: float, lam: float) -> bool:
    """Jensen's inequality for t/log t at one point, with a relative rounding allowance."""
    g = lambda t: t / math.log(t)  # noqa: E731
    mid = lam * t0 + (1 - lam) * t1
    chord = lam * g(t0) + (1 - lam) * g(t1)
    return g(mid) >= chord * (1 - 1e-14)


# -- campaign ----------------------------------------------------------------


@dataclass
class CampaignConfig:
    z_min: int = SWEEP_Z_MIN
    z_max: int = QUICK_Z_MAX
    checkpoint_stride: int = DEFAULT_CHECKPOINT_STRIDE
    output_path: str | None = None
    mode: str = "quick"
    segment_length: int = DEFAULT_SEGMENT_LENGTH
    threads: int = 1
    checkpoint_path: str | None = None
    resume_path: str | None = None

    def __post_init__(self):
        if not SWEEP_Z_MIN <= self.z_min < self.z_max:
            raise PreconditionError(
                f"need {SWEEP_Z_MIN} <= z_min < z_max, got [{self.z_min}, {self.z_max})"
            )
        if self.mode not in ("quick", "full"):
            raise PreconditionError(f"mode must be 'quick' or 'full', got {self.mode!r}")
        if self.checkpoint_stride < 1 or self.segment_length < 1:
            raise PreconditionError("checkpoint_stride and segment_length must be >= 1")

    @classmethod
    def for_mode(cls, mode: str, **overrides) -> CampaignConfig:
        z_max = FULL_Z_MAX if mode == "full" else QUICK_Z_MAX
        return cls(**{"z_max": z_max, "mode": mode, **overrides})

    def identity(self) -> dict[str, int]:
        """Fields that must match for a checkpoint file to be resumable."""
        return {
            "z_min": self.z_min,
            "z_max": self.z_max,
            "checkpoint_stride": self.checkpoint_stride,
            "segment_length": self.segment_length,
        }


@dataclass
class _Tally:
    n_checks: int = 0
    min_margin: float = math.inf
    argmin: list = field(default_factory=lambda: [None, None])
    min_rel_margin: float = math.inf
    argmin_rel: list = field(default_factory=lambda: [None, None])
    n_failures: int = 0
    failures: list = field(default_factory=list)
    n_inconclusive: int = 0
    inconclusive: list = field(default_factory=list)
    fresh_S: list = field(default_factory=list)
    fresh_H: list = field(default_factory=list)

    def record(self, z: np.ndarray, Y: np.ndarray, lhs: np.ndarray, rhs: np.ndarray) -> None:
        margin = rhs - lhs
        rel = margin / rhs
        self.n_checks += len(z)
        i = int(np.argmin(margin))
        if margin[i] < self.min_margin:
            self.min_margin, self.argmin = float(margin[i]), [int(z[i]), float(Y[i])]
        i = int(np.argmin(rel))
        if rel[i] < self.min_rel_margin:
            self.min_rel_margin, self.argmin_rel = float(rel[i]), [int(z[i]), float(Y[i])]
        bad = np.flatnonzero(margin <= 0)
        self.n_failures += len(bad)
        for j in bad[: max(0, MAX_LISTED - len(self.failures))].tolist():
            self.failures.append([int(z[j]), float(Y[j]), float(lhs[j]), float(rhs[j])])
        unsure = np.flatnonzero((margin > 0) & (margin <= MARGIN_SLACK * rhs))
        self.n_inconclusive += len(unsure)
        for j in unsure[: max(0, MAX_LISTED - len(self.inconclusive))].tolist():
            self.inconclusive.append([int(z[j]), float(Y[j]), float(lhs[j]), float(rhs[j])])


@dataclass
class CampaignReport:
    z_min: int
    z_max: int
    n_checks: int
    min_margin: float
    argmin: list
    min_rel_margin: float
    argmin_rel: list
    n_failures: int
    failures: list
    n_inconclusive: int
    inconclusive: list
    checkpoints: list
    verdict: bool
    metadata: dict

    def to_dict(self) -> dict[str, Any]:
        return {"schema": SCHEMA_VERSION, "kind": "campaign", **asdict(self)}


def _checkpoint_record(cfg: CampaignConfig, state: SweepState, tally: _Tally) -> dict[str, Any]:
    fresh_S = math.fsum(tally.fresh_S)
    fresh_H = math.fsum(tally.fresh_H)
    drift_S = abs(state.S1 - fresh_S) / state.S1
    drift_H = abs(state.H1 - fresh_H) / state.H1
    tally_state = asdict(tally)
    return {
        **state.to_dict(),
        "fresh_S1": fresh_S,
        "fresh_H1": fresh_H,
        "drift_ok": drift_S <= DRIFT_TOLERANCE and drift_H <= DRIFT_TOLERANCE,
        "config": cfg.identity(),
        "tally": tally_state,
    }


def _public_checkpoint(rec: dict[str, Any]) -> dict[str, Any]:
    keys = ("z", "S1", "S1_compensation", "H1", "H1_compensation", "piz", "fresh_S1", "fresh_H1", "drift_ok")
    return {k: rec[k] for k in keys}


def read_checkpoints(path: str | os.PathLike) -> list[dict[str, Any]]:
    """All complete JSON lines of a checkpoint file (a torn final line is ignored)."""
    out = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        try:
            out.append(json.loads(line))
        except json.JSONDecodeError:
            break
    return out


def _due(prev_z: int, z: int, stride: int) -> bool:
    return prev_z // stride != z // stride


def run_campaign(cfg: CampaignConfig) -> CampaignReport:
    """Sweep z over [z_min, z_max), checking the inequality at Y = 4z^2 and 4(z+1)^2."""
    state = SweepState()
    tally = _Tally()
    records: list[dict[str, Any]] = []
    if cfg.resume_path and Path(cfg.resume_path).exists():
        records = read_checkpoints(cfg.resume_path)
        if records:
            last = records[-1]
            if last["config"] != cfg.identity():
                raise PreconditionError(
                    f"checkpoint config {last['config']} does not match {cfg.identity()}"
                )
            state = SweepState(**{k: last[k] for k in SweepState.__dataclass_fields__})
            tally = _Tally(**last["tally"])
            log.info("resuming at z=%d from %s", state.z, cfg.resume_path)
    ckpt_path = cfg.checkpoint_path or cfg.resume_path
    ckpt = open(ckpt_path, "a") if ckpt_path else None
    last_z = cfg.z_max - 1
    try:
        for block in stream_prefix(
            last_z,
            state=state,
            segment_length=cfg.segment_length,
            threads=cfg.threads,
            cut_every=cfg.checkpoint_stride,
        ):
            prev_z = block.base - 1
            tally.fresh_S.append(block.fresh_S)
            tally.fresh_H.append(block.fresh_H)
            lo = max(0, cfg.z_min - block.base)
            if lo < len(block.S_hi):
                z = block.z[lo:]
                S, H, pi = block.S_hi[lo:], block.H_hi[lo:], block.pi[lo:].astype(np.float64)
                zf = z.astype(np.float64)
                for Y in (4.0 * zf * zf, 4.0 * (zf + 1.0) * (zf + 1.0)):
                    lhs, rhs = inequality_margins(Y, S, H, pi)
                    tally.record(z, Y, lhs, rhs)
            if _due(prev_z, state.z, cfg.checkpoint_stride) or state.z == last_z:
                rec = _checkpoint_record(cfg, state, tally)
                records.append(rec)
                if ckpt:
                    ckpt.write(json.dumps(rec, sort_keys=True) + "\n")
                    ckpt.flush()
                    os.fsync(ckpt.fileno())
                log.info("checkpoint z=%d min_rel_margin=%.3e", state.z, tally.min_rel_margin)
    finally:
        if ckpt:
            ckpt.close()

    checkpoints = [_public_checkpoint(r) for r in records]
    drift_ok = all(c["drift_ok"] for c in checkpoints)
    meta = {
        "mode": cfg.mode,
        "segment_length": cfg.segment_length,
        "checkpoint_stride": cfg.checkpoint_stride,
        "Y_values": ["4z^2", "4(z+1)^2"],
        "margin_slack_rel": MARGIN_SLACK,
        "drift_tolerance_rel": DRIFT_TOLERANCE,
        "drift_ok": drift_ok,
        "concavity": concavity_metadata(cfg.z_min),
    }
    verdict = (
        tally.n_checks == 2 * (cfg.z_max - cfg.z_min)
        and tally.n_failures == 0
        and tally.n_inconclusive == 0
        and drift_ok
        and meta["concavity"]["applies"]
    )
    return CampaignReport(
        cfg.z_min,
        cfg.z_max,
        tally.n_checks,
        tally.min_margin,
        tally.argmin,
        tally.min_rel_margin,
        tally.argmin_rel,
        tally.n_failures,
        tally.failures,
        tally.n_inconclusive,
        tally.inconclusive,
        checkpoints,
        bool(verdict),
        meta,
    )
