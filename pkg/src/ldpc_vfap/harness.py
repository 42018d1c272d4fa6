"""BPSK over AWGN, systematic encoding and Monte Carlo decoder sweeps."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from ldpc_vfap import rng as rngmod
from ldpc_vfap.code_model import ParityCheckMatrix
from ldpc_vfap.cycles import CycleCensus, census as run_census
from ldpc_vfap.decoder import DecoderConfig, ReweightVector, Variant, decode_batch, reweight_for

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "decoder",
    "snr_db",
    "trials",
    "bit_errors",
    "frame_errors",
    "undetected_frames",
    "ber",
    "fer",
    "avg_iterations",
    "converged_fraction",
    "max_iter",
    "seed",
    "code_id",
)

VARIANT_ORDER = {v: k for k, v in enumerate(Variant)}


class RankDeficient(ValueError):
    pass


@dataclass(frozen=True)
class ChannelModel:
    """Unit-energy BPSK at a given Eb/N0 (dB) and code rate."""

    snr_db: float
    rate: float

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ValueError(f"rate must lie in (0, 1], got {self.rate!r}")

    @property
    def sigma2(self) -> float:
        return 1.0 / (2.0 * self.rate * 10.0 ** (self.snr_db / 10.0))


def modulate(x) -> np.ndarray:
    return np.where(np.asarray(x) == 1, 1.0, -1.0)


def transmit(s, sigma2: float, bitgen: np.random.Philox) -> np.ndarray:
    s = np.asarray(s, dtype=np.float64)
    return s + math.sqrt(sigma2) * rngmod.gaussian(bitgen, s.size).reshape(s.shape)


class SystematicEncoder:
    """GF(2) row reduction of H with column pivoting.

    Message bits occupy the non-pivot columns (``info_positions``); each pivot
    bit is the parity of the message bits in its reduced row.
    """

    def __init__(self, h: ParityCheckMatrix):
        a = h.to_dense().copy()
        m, n = a.shape
        pivots = []
        row = 0
        for col in range(n):
            if row == m:
                break
            hits = np.flatnonzero(a[row:, col]) + row
            if len(hits) == 0:
                continue
            p = hits[0]
            if p != row:
                a[[row, p]] = a[[p, row]]
            others = np.flatnonzero(a[:, col])
            others = others[others != row]
            a[others] ^= a[row]
            pivots.append(col)
            row += 1
        self.n = n
        self.rank = row
        self.pivots = np.array(pivots, dtype=np.int64)
        self.info_positions = np.setdiff1d(np.arange(n), self.pivots)
        if len(self.info_positions) == 0:
            raise RankDeficient("parity-check matrix has full column rank; the code is trivial")
        self._parity = a[: self.rank][:, self.info_positions].astype(np.uint8)

    @property
    def k(self) -> int:
        return len(self.info_positions)

    def encode(self, msg) -> np.ndarray:
        msg = np.asarray(msg, dtype=np.uint8)
        batch = msg.ndim == 2
        msg2 = np.atleast_2d(msg)
        if msg2.shape[1] != self.k:
            raise ValueError(f"message length must be {self.k}, got {msg2.shape[1]}")
        cw = np.zeros((msg2.shape[0], self.n), dtype=np.uint8)
        cw[:, self.info_positions] = msg2
        cw[:, self.pivots] = (msg2.astype(np.int64) @ self._parity.T.astype(np.int64)) & 1
        return cw if batch else cw[0]

    def extract(self, codeword) -> np.ndarray:
        return np.asarray(codeword)[..., self.info_positions]


def encode_systematic(h: ParityCheckMatrix, msg) -> np.ndarray:
    return SystematicEncoder(h).encode(msg)


@dataclass(frozen=True)
class StopRule:
    """Simulate up to ``max_trials`` frames, stopping early after ``min_frame_errors`` (if set)."""

    max_trials: int
    min_frame_errors: int | None = 100

    def __post_init__(self):
        if self.max_trials < 1:
            raise ValueError("max_trials must be >= 1")
        if self.min_frame_errors is not None and self.min_frame_errors < 1:
            raise ValueError("min_frame_errors must be >= 1")


@dataclass
class FrameStats:
    """Per-frame outcomes for one (decoder, SNR) point, frames in index order."""

    bit_errors: np.ndarray
    iterations: np.ndarray
    converged: np.ndarray
    undetected: np.ndarray

    @property
    def frame_errors(self) -> np.ndarray:
        return self.bit_errors > 0

    def __len__(self) -> int:
        return len(self.bit_errors)

    @classmethod
    def concat(cls, parts: Sequence["FrameStats"]) -> "FrameStats":
        return cls(*(np.concatenate([getattr(p, f) for p in parts]) for f in ("bit_errors", "iterations", "converged", "undetected")))

    def head(self, count: int) -> "FrameStats":
        return FrameStats(self.bit_errors[:count], self.iterations[:count], self.converged[:count], self.undetected[:count])


@dataclass(frozen=True)
class SimRecord:
    decoder_variant: str
    snr_db: float
    trials: int
    bit_errors: int
    frame_errors: int
    undetected_frames: int
    ber: float
    fer: float
    avg_iterations: float
    converged_fraction: float
    max_iter: int
    seed: int
    code_id: str = ""

    @classmethod
    def from_frames(cls, variant: str, snr_db: float, n: int, stats: FrameStats, max_iter: int, seed: int, code_id: str = "") -> "SimRecord":
        trials = len(stats)
        bit_errors = int(stats.bit_errors.sum())
        frame_errors = int(stats.frame_errors.sum())
        return cls(
            decoder_variant=variant,
            snr_db=float(snr_db),
            trials=trials,
            bit_errors=bit_errors,
            frame_errors=frame_errors,
            undetected_frames=int(stats.undetected.sum()),
            ber=bit_errors / (trials * n),
            fer=frame_errors / trials,
            avg_iterations=float(stats.iterations.sum()) / trials,
            converged_fraction=float(stats.converged.sum()) / trials,
            max_iter=max_iter,
            seed=seed,
            code_id=code_id,
        )


def _snr_label(snr_db: float) -> int:
    return int(round(snr_db * 1000))


def frame_inputs(
    h: ParityCheckMatrix,
    channel: ChannelModel,
    seed: int,
    frames: Iterable[int],
    encoder: SystematicEncoder | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Transmitted codewords and received vectors for the given frame indices.

    Noise depends only on (seed, snr, frame index), never on the decoder, so
    every decoder sees the same channel realizations.
    """
    frames = list(frames)
    label = _snr_label(channel.snr_db)
    cws = np.zeros((len(frames), h.n), dtype=np.uint8)
    ys = np.empty((len(frames), h.n))
    for row, f in enumerate(frames):
        if encoder is not None:
            msg = rngmod.bits(rngmod.substream(seed, "message", label, f), encoder.k)
            cws[row] = encoder.encode(msg)
        ys[row] = transmit(modulate(cws[row]), channel.sigma2, rngmod.substream(seed, "noise", label, f))
    return cws, ys


def simulate_frames(
    h: ParityCheckMatrix,
    cfg: DecoderConfig,
    rho: ReweightVector | None,
    channel: ChannelModel,
    seed: int,
    start: int,
    count: int,
    encoder: SystematicEncoder | None = None,
) -> FrameStats:
    cws, ys = frame_inputs(h, channel, seed, range(start, start + count), encoder)
    r = decode_batch(h, ys, channel.sigma2, cfg, rho)
    bit_errors = (r.codewords != cws).sum(axis=1)
    return FrameStats(
        bit_errors=bit_errors.astype(np.int64),
        iterations=r.iterations,
        converged=r.converged,
        undetected=r.converged & (bit_errors > 0),
    )


def run_point(
    h: ParityCheckMatrix,
    cfg: DecoderConfig,
    rho: ReweightVector | None,
    channel: ChannelModel,
    stop: StopRule,
    seed: int,
    chunk: int = 250,
    encoder: SystematicEncoder | None = None,
) -> FrameStats:
    parts: list[FrameStats] = []
    done = 0
    errors = 0
    while done < stop.max_trials:
        count = min(chunk, stop.max_trials - done)
        stats = simulate_frames(h, cfg, rho, channel, seed, done, count, encoder)
        if stop.min_frame_errors is not None:
            cum = errors + np.cumsum(stats.frame_errors)
            reached = np.flatnonzero(cum >= stop.min_frame_errors)
            if len(reached):
                parts.append(stats.head(int(reached[0]) + 1))
                break
            errors = int(cum[-1])
        parts.append(stats)
        done += count
    return FrameStats.concat(parts)


def run_sweep(
    h: ParityCheckMatrix,
    census: CycleCensus | None,
    variants: Sequence[Variant | str],
    snrs: Sequence[float],
    max_iter: int,
    trials: int,
    seed: int,
    stop_rule: StopRule | None = None,
    *,
    rate: float | None = None,
    random_messages: bool = False,
    rho_uniform: float | None = None,
    rho_v_override: float | None = None,
    llr_clamp: float = 50.0,
    chunk: int = 250,
    code_id: str = "",
) -> list[SimRecord]:
    """Simulate every (variant, SNR) pair on paired noise and tally records.

    ``rate`` defaults to the design rate 1 - m/n. With ``random_messages``
    frames carry encoded random messages, otherwise the all-zero codeword.
    """
    stop = stop_rule or StopRule(trials)
    if rate is None:
        rate = 1.0 - h.m / h.n
    encoder = None
    if random_messages:
        try:
            encoder = SystematicEncoder(h)
        except RankDeficient as exc:
            log.warning("%s; falling back to the all-zero codeword", exc)
    kinds = sorted({Variant.parse(v) if isinstance(v, str) else Variant(v) for v in variants}, key=VARIANT_ORDER.get)
    if Variant.VFAP_BP in kinds and census is None:
        census = run_census(h)
    records = []
    for variant in kinds:
        cfg = DecoderConfig(variant, max_iter, llr_clamp, rho_uniform, rho_v_override)
        rho = reweight_for(h, cfg, census)
        for snr in sorted(snrs):
            channel = ChannelModel(snr, rate)
            stats = run_point(h, cfg, rho, channel, stop, seed, chunk, encoder)
            records.append(SimRecord.from_frames(variant.value, snr, h.n, stats, max_iter, seed, code_id))
            log.info("%s snr=%.3g trials=%d fer=%.3g", variant.value, snr, len(stats), records[-1].fer)
    return records


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def write_csv(records: Iterable[SimRecord], sink: TextIO) -> None:
    ordered = sorted(records, key=lambda r: (VARIANT_ORDER.get(Variant.parse(r.decoder_variant), 99), r.snr_db))
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in ordered:
        w.writerow([
            r.decoder_variant,
            _fmt(r.snr_db),
            r.trials,
            r.bit_errors,
            r.frame_errors,
            r.undetected_frames,
            _fmt(r.ber),
            _fmt(r.fer),
            _fmt(r.avg_iterations),
            _fmt(r.converged_fraction),
            r.max_iter,
            r.seed,
            r.code_id,
        ])


def read_csv(source: TextIO) -> list[SimRecord]:
    reader = csv.DictReader(source)
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header: {reader.fieldnames}")
    out = []
    for row in reader:
        out.append(SimRecord(
            decoder_variant=row["decoder"],
            snr_db=float(row["snr_db"]),
            trials=int(row["trials"]),
            bit_errors=int(row["bit_errors"]),
            frame_errors=int(row["frame_errors"]),
            undetected_frames=int(row["undetected_frames"]),
            ber=float(row["ber"]),
            fer=float(row["fer"]),
            avg_iterations=float(row["avg_iterations"]),
            converged_fraction=float(row["converged_fraction"]),
            max_iter=int(row["max_iter"]),
            seed=int(row["seed"]),
            code_id=row["code_id"],
        ))
    return out
