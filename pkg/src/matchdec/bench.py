"""Monte Carlo experiments: logical error rates, threshold scans, approximation error, timing.

Trial ``i`` of a run with master seed ``s`` draws its noise from
``numpy.random.default_rng([s, i])``.  Shards of trials can therefore be
spread over any number of worker processes and still reproduce the
single-process failure counts and corrections exactly.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import math
import multiprocessing
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .codes import CodeInstance, logical_failure, repetition_code, sample_noise, toric_2d, \
    toric_3d_phenomenological
from .decoder import Decoder
from .exceptions import DecodeError

__all__ = [
    "ExperimentConfig",
    "TrialStats",
    "run_logical_error",
    "run_threshold_scan",
    "run_approximation_error",
    "run_timing",
    "crossing_verdicts",
    "emit_results",
    "parse_results",
    "CSV_FIELDS",
]

CODES = ("rep", "toric2d", "toric3d")
PER_DEFECT = "defects"  # m equal to the trial's own defect count


@dataclass
class ExperimentConfig:
    """One experiment cell.

    ``num_neighbours=None`` selects exact matching.  ``noise_p`` draws the
    noise at a rate other than the one the edge weights were built for.
    For ``toric3d``, ``T`` defaults to ``L`` and ``q`` to ``p``.
    """

    code: str = "toric2d"
    L: int = 8
    p: float = 0.1
    T: int | None = None
    q: float | None = None
    num_neighbours: int | str | None = None
    trials: int = 1000
    seed: int = 0
    workers: int = 1
    noise_p: float | None = None
    warmup: int = 20

    def __post_init__(self):
        if self.code not in CODES:
            raise ValueError(f"unknown code {self.code!r}; choose from {', '.join(CODES)}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.code == "toric3d":
            self.T = self.L if self.T is None else self.T
            self.q = self.p if self.q is None else self.q
        if isinstance(self.num_neighbours, str) and self.num_neighbours.lower() == "all":
            self.num_neighbours = None

    @property
    def mode(self) -> str:
        return "exact" if self.num_neighbours is None else "local"

    def make_code(self) -> CodeInstance:
        if self.code == "rep":
            return repetition_code(self.L, self.p)
        if self.code == "toric2d":
            return toric_2d(self.L, self.p)
        return toric_3d_phenomenological(self.L, self.T, self.p, self.q)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


@dataclass
class TrialStats:
    experiment: str
    code: str
    L: int
    T: int
    p: float
    q: float | None
    mode: str
    m: int | str | None
    trials: int
    failures: int
    rate: float
    stderr: float
    mean_latency_us: float
    p95_latency_us: float
    mismatches: int
    m_escalations: int
    seed: int
    setup_us: float = 0.0
    correction_digest: str = ""

    @property
    def mismatch_rate(self) -> float:
        return self.mismatches / self.trials


CSV_FIELDS = [f.name for f in dataclasses.fields(TrialStats)]


def binomial_stderr(k: int, n: int) -> float:
    r = k / n
    return math.sqrt(r * (1 - r) / n)


# ---------------------------------------------------------------------------
# trial loop


@dataclass
class _Shard:
    failures: np.ndarray
    escalations: np.ndarray
    mismatches: np.ndarray
    latencies: list = field(default_factory=list)
    digests: list = field(default_factory=list)


def _run_shard(args) -> _Shard:
    config, modes, start, stop, compare, timed = args
    code = config.make_code()
    dec = Decoder(code.graph)
    k = len(modes)
    out = _Shard(np.zeros(k, np.int64), np.zeros(k, np.int64), np.zeros(k, np.int64),
                 [[] for _ in modes], [[] for _ in modes])
    if timed:
        # exclude compilation and table construction from the timed region
        warm = np.random.default_rng([config.seed, 0xFFFFFFFF, 0xFFFFFFFF])
        for _ in range(config.warmup):
            ns = sample_noise(code, warm, config.noise_p)
            for m in modes:
                dec.decode(ns.syndrome, _resolve_m(m, dec, ns.syndrome))
    for trial in range(start, stop):
        rng = np.random.default_rng([config.seed, trial])
        ns = sample_noise(code, rng, config.noise_p)
        try:
            ref = dec.decode_detailed(ns.syndrome, None).weight if compare else None
            for i, m in enumerate(modes):
                mm = _resolve_m(m, dec, ns.syndrome)
                t0 = time.perf_counter()
                r = dec.decode_detailed(ns.syndrome, mm)
                dt = time.perf_counter() - t0
                if timed:
                    out.latencies[i].append(dt)
                out.failures[i] += int(logical_failure(code, ns.noise, r.correction).any())
                out.escalations[i] += r.escalations
                if compare and abs(r.weight - ref) > WEIGHT_TOL:
                    out.mismatches[i] += 1
                out.digests[i].append(hashlib.blake2b(r.correction.tobytes(),
                                                      digest_size=8).digest())
        except DecodeError as exc:
            raise DecodeError(f"trial {trial} (seed {config.seed}) failed: {exc}") from exc
    return out


WEIGHT_TOL = 1e-9


def _resolve_m(m, dec: Decoder, syndrome):
    if m == PER_DEFECT:
        return max(int(np.count_nonzero(dec.fix_parity(syndrome))), 1)
    return m


def _shards(config: ExperimentConfig):
    n = config.workers
    edges = np.linspace(0, config.trials, n + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _execute(config: ExperimentConfig, modes, compare=False, timed=False) -> list[_Shard]:
    jobs = [(config, modes, a, b, compare, timed) for a, b in _shards(config)]
    if len(jobs) == 1:
        return [_run_shard(jobs[0])]
    with multiprocessing.get_context("spawn").Pool(len(jobs)) as pool:
        return pool.map(_run_shard, jobs)


def _stats(experiment, config, m, shards, i, setup_us=0.0) -> TrialStats:
    failures = int(sum(s.failures[i] for s in shards))
    trials = config.trials
    lat = np.concatenate([np.asarray(s.latencies[i], float) for s in shards]) * 1e6
    h = hashlib.sha256()
    for s in shards:
        for d in s.digests[i]:
            h.update(d)
    return TrialStats(
        experiment=experiment, code=config.code, L=config.L,
        T=config.T if config.T is not None else 1, p=config.p, q=config.q,
        mode="exact" if m is None else "local", m=m, trials=trials, failures=failures,
        rate=failures / trials, stderr=binomial_stderr(failures, trials),
        mean_latency_us=float(lat.mean()) if lat.size else 0.0,
        p95_latency_us=float(np.percentile(lat, 95)) if lat.size else 0.0,
        mismatches=int(sum(s.mismatches[i] for s in shards)),
        m_escalations=int(sum(s.escalations[i] for s in shards)), seed=config.seed,
        setup_us=setup_us, correction_digest=h.hexdigest()[:16])


def run_logical_error(config: ExperimentConfig) -> TrialStats:
    """Logical error rate of one (code, p, decoder mode) cell."""
    shards = _execute(config, [config.num_neighbours])
    return _stats("logical", config, config.num_neighbours, shards, 0)


def run_threshold_scan(config: ExperimentConfig, Ls, ps, rounds=None,
                       q=None) -> list[TrialStats]:
    """The full ``L`` x ``p`` grid of logical error rates, ordered by ``p`` then ``L``.

    For ``toric3d`` each cell uses ``T = L`` and ``q = p`` unless ``rounds``
    or ``q`` fix them.
    """
    out = []
    for p in ps:
        for L in Ls:
            cell = config.replace(L=int(L), p=float(p))
            if config.code == "toric3d":
                cell.T = int(L) if rounds is None else int(rounds)
                cell.q = float(p) if q is None else float(q)
            s = run_logical_error(cell)
            s.experiment = "threshold"
            out.append(s)
    return out


def crossing_verdicts(table: list[TrialStats], sigma: float = 3.0) -> dict[float, int]:
    """Per ``p``: +1 if the rate falls from the smallest to the largest ``L`` by more than
    ``sigma`` combined standard errors, -1 if it rises by that much, 0 otherwise.

    A single lattice size gives no verdict (0).
    """
    verdict = {}
    for p in sorted({s.p for s in table}):
        row = sorted((s for s in table if s.p == p), key=lambda s: s.L)
        if len(row) < 2:
            verdict[p] = 0
            continue
        lo, hi = row[0], row[-1]
        gap = lo.rate - hi.rate
        bound = sigma * math.hypot(lo.stderr, hi.stderr)
        verdict[p] = 1 if gap > bound else -1 if -gap > bound else 0
    return verdict


def run_approximation_error(config: ExperimentConfig, ms) -> list[TrialStats]:
    """Paired comparison of local matching at each ``m`` against exact matching.

    Every trial decodes the same noise sample in every mode; a mismatch is a
    solution weight differing from the exact one by more than 1e-9.
    ``m`` may be ``"defects"`` to use each trial's defect count.
    """
    ms = list(ms)
    shards = _execute(config, ms, compare=True)
    return [_stats("approx", config, m, shards, i) for i, m in enumerate(ms)]


def run_timing(config: ExperimentConfig) -> TrialStats:
    """Per-decode wall-clock latency, excluding noise sampling and warmup.

    ``setup_us`` reports graph construction plus, in exact mode, the
    all-pairs precomputation, measured on a fresh decoder.
    """
    t0 = time.perf_counter()
    code = config.make_code()
    dec = Decoder(code.graph)
    if config.num_neighbours is None:
        dec.precompute_all_pairs()
    setup_us = (time.perf_counter() - t0) * 1e6
    shards = _execute(config.replace(workers=1), [config.num_neighbours], timed=True)
    return _stats("timing", config, config.num_neighbours, shards, 0, setup_us)


# ---------------------------------------------------------------------------
# output


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


_INT_FIELDS = {"L", "T", "trials", "failures", "mismatches", "m_escalations", "seed"}
_FLOAT_FIELDS = {"p", "rate", "stderr", "mean_latency_us", "p95_latency_us", "setup_us"}


def _from_cell(name, text):
    if name in _INT_FIELDS:
        return int(text)
    if name in _FLOAT_FIELDS:
        return float(text)
    if name == "q":
        return None if text == "" else float(text)
    if name == "m":
        if text == "":
            return None
        return int(text) if text.lstrip("-").isdigit() else text
    return text


def emit_results(stats: list[TrialStats], path, fmt: str = "csv", config=None,
                 timestamp: str | None = None) -> None:
    """Write results as CSV or as JSON lines (one object per row plus config echo).

    ``path`` may also be an open text file.
    """
    if fmt not in ("csv", "json-lines"):
        raise ValueError(f"unknown format {fmt!r}; use csv or json-lines")
    if hasattr(path, "write"):
        _emit(stats, path, fmt, config, timestamp)
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            _emit(stats, fh, fmt, config, timestamp)


def _emit(stats, fh, fmt, config, timestamp):
    if fmt == "csv":
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for s in stats:
            w.writerow([_cell(getattr(s, f)) for f in CSV_FIELDS])
        return
    stamp = timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds")
    echo = dataclasses.asdict(config) if dataclasses.is_dataclass(config) else config
    for s in stats:
        row = dataclasses.asdict(s)
        row.update(config=echo, version=__version__, timestamp=stamp)
        fh.write(json.dumps(row, sort_keys=True) + "\n")


def parse_results(path, fmt: str = "csv") -> list[TrialStats]:
    if fmt == "csv":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        return [TrialStats(**{k: _from_cell(k, r[k]) for k in CSV_FIELDS}) for r in rows]
    if fmt == "json-lines":
        out = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    row = json.loads(line)
                    out.append(TrialStats(**{k: row[k] for k in CSV_FIELDS}))
        return out
    raise ValueError(f"unknown format {fmt!r}; use csv or json-lines")
