"""Seeded random bpas and the approximate-after-each-combination experiment.

Every trial owns a private PCG64 stream seeded by ``SeedSequence(seed,
spawn_key=(trial,))``, so trials can run in any order or in parallel and
still yield the same records.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

import numpy as np

from .approx import ApproxMethod, default_method_suite
from .core import Bpa, Frame, TotalConflict, combine, pignistic
from .metrics import ErrorTriple, error_triple

RNG_NAME = "numpy-PCG64/SeedSequence(seed,spawn_key=(trial,))"
TRACKS = ("cumulative", "from-exact")
# "uniform-size": cardinality uniform on 1..N, then a uniform subset of that size.
# "uniform": uniform over all nonempty subsets.
SUBSET_DISTS = ("uniform-size", "uniform")


@dataclass(frozen=True)
class GenConfig:
    frame_size: int = 32
    focal_count: int = 8
    rng_seed: int = 0
    rate: float = 1.0
    subset_dist: str = "uniform-size"

    def __post_init__(self):
        if self.subset_dist not in SUBSET_DISTS:
            raise ValueError(f"subset_dist must be one of {SUBSET_DISTS}, got {self.subset_dist!r}")
        if not 1 <= self.frame_size <= 64:
            raise ValueError(f"frame_size must be in 1..64, got {self.frame_size}")
        if not 1 <= self.focal_count <= 2**self.frame_size - 1:
            raise ValueError(f"focal_count must be in 1..2^frame_size-1, got {self.focal_count}")
        if not self.rate > 0.0:
            raise ValueError(f"rate must be positive, got {self.rate}")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must be a 64-bit unsigned integer")

    def frame(self) -> Frame:
        return Frame.of_size(self.frame_size)


@dataclass(frozen=True)
class ExperimentConfig:
    gen: GenConfig = field(default_factory=GenConfig)
    methods: dict = field(default_factory=default_method_suite)
    combinations: int = 5
    trials: int = 1000
    track: str = "cumulative"

    def __post_init__(self):
        if self.combinations < 1:
            raise ValueError("combinations must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.track not in TRACKS:
            raise ValueError(f"track must be one of {TRACKS}, got {self.track!r}")
        if not self.methods:
            raise ValueError("at least one method is required")


@dataclass(frozen=True)
class TrialRecord:
    method: str
    step: int
    trial: int
    n_original: int
    n_approx: int
    errors: ErrorTriple


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,))))


def random_subset(rng: np.random.Generator, n: int, dist: str = "uniform-size") -> int:
    """Random nonempty subset of ``range(n)`` as a bitmask."""
    if dist == "uniform-size":
        size = int(rng.integers(1, n + 1))
        bits = 0
        for i in rng.choice(n, size, replace=False).tolist():
            bits |= 1 << i
        return bits
    while True:
        bits = int(rng.integers(0, 2**n, dtype=np.uint64)) if n == 64 else int(rng.integers(1, 2**n))
        if bits:
            return bits


def gen_random_bpa(cfg: GenConfig, rng: np.random.Generator, frame: Optional[Frame] = None) -> Bpa:
    """Stick-breaking bpa with ``cfg.focal_count`` distinct random focal sets.

    Each of the first ``focal_count - 1`` sets takes the fraction
    ``P(Y <= X) = 1 - exp(-rate * X)`` of the remaining mass, with ``X`` and
    ``Y`` i.i.d. exponential; the last set takes what is left.
    """
    frame = frame or cfg.frame()
    if frame.size != cfg.frame_size:
        raise ValueError("frame does not match cfg.frame_size")
    masses: dict[int, float] = {}
    rest = 1.0

    def fresh() -> int:
        while True:
            bits = random_subset(rng, cfg.frame_size, cfg.subset_dist)
            if bits not in masses:
                return bits

    for _ in range(cfg.focal_count - 1):
        x = rng.exponential(1.0 / cfg.rate)
        fraction = -math.expm1(-cfg.rate * x)
        mass = fraction * rest
        masses[fresh()] = mass
        rest -= mass
    masses[fresh()] = rest
    return Bpa(frame, masses)


def run_trial(cfg: ExperimentConfig, trial: int) -> Optional[list[TrialRecord]]:
    """One trial for every method; ``None`` if any combination hits total conflict."""
    rng = trial_rng(cfg.gen.rng_seed, trial)
    frame = cfg.gen.frame()
    exact = gen_random_bpa(cfg.gen, rng, frame)
    tracks = {name: exact for name in cfg.methods}
    records = []
    try:
        for step in range(1, cfg.combinations + 1):
            evidence = gen_random_bpa(cfg.gen, rng, frame)
            exact = combine(exact, evidence)
            p0 = pignistic(exact)
            for name, method in cfg.methods.items():
                if cfg.track == "cumulative":
                    approximated = method(combine(tracks[name], evidence))
                else:
                    approximated = method(exact)
                tracks[name] = approximated
                records.append(
                    TrialRecord(
                        name, step, trial, len(exact), len(approximated),
                        error_triple(p0, pignistic(approximated)),
                    )
                )
    except TotalConflict:
        return None
    return records


def _run_chunk(args):
    cfg, trials = args
    return [(t, run_trial(cfg, t)) for t in trials]


def iter_trials(cfg: ExperimentConfig, workers: int = 1) -> Iterator[tuple[int, Optional[list[TrialRecord]]]]:
    """Yield ``(trial, records or None)`` in trial order."""
    if workers <= 1:
        for t in range(cfg.trials):
            yield t, run_trial(cfg, t)
        return
    chunk = max(1, cfg.trials // (workers * 4))
    chunks = [(cfg, range(s, min(s + chunk, cfg.trials))) for s in range(0, cfg.trials, chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_run_chunk, chunks):
            yield from part


@dataclass
class Summary:
    """Running count/mean/min/max of one quantity."""

    count: int = 0
    total: float = 0.0
    min: float = math.inf
    max: float = -math.inf

    def add(self, value: float) -> None:
        self.count += 1
        self.total += value
        self.min = min(self.min, value)
        self.max = max(self.max, value)

    @property
    def mean(self) -> float:
        return self.total / self.count if self.count else math.nan


QUANTITIES = ("n_original", "n_approx", "error1", "error2", "error3")


@dataclass
class RunStats:
    methods: tuple[str, ...]
    combinations: int
    trials: int = 0
    aborted: int = 0
    cells: dict = field(default_factory=dict)

    def add(self, rec: TrialRecord) -> None:
        cell = self.cells.setdefault((rec.method, rec.step), {q: Summary() for q in QUANTITIES})
        cell["n_original"].add(rec.n_original)
        cell["n_approx"].add(rec.n_approx)
        cell["error1"].add(rec.errors.error1)
        cell["error2"].add(rec.errors.error2)
        cell["error3"].add(rec.errors.error3)

    def get(self, method: str, step: int, quantity: str) -> Summary:
        return self.cells[(method, step)][quantity]

    def mean(self, method: str, step: int, quantity: str) -> float:
        return self.get(method, step, quantity).mean


def aggregate(cfg: ExperimentConfig, results: Iterable[tuple[int, Optional[list[TrialRecord]]]], sink=None) -> RunStats:
    """Fold per-trial results into :class:`RunStats`; ``sink`` sees each record."""
    stats = RunStats(tuple(cfg.methods), cfg.combinations)
    for _, records in results:
        if records is None:
            stats.aborted += 1
            continue
        stats.trials += 1
        for rec in records:
            stats.add(rec)
            if sink is not None:
                sink(rec)
    return stats


def run_experiment(cfg: ExperimentConfig, workers: int = 1, sink=None) -> RunStats:
    return aggregate(cfg, iter_trials(cfg, workers), sink)
