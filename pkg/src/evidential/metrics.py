"""Decision extraction and error measures on pignistic distributions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FrameMismatch, PignisticDist


@dataclass(frozen=True)
class DecisionReport:
    best_index: int
    ranking: tuple[int, ...]


@dataclass(frozen=True)
class ErrorTriple:
    error1: float
    error2: int
    error3: int


def _same_frame(p0: PignisticDist, papp: PignisticDist) -> None:
    if p0.frame != papp.frame:
        raise FrameMismatch("distributions are over different frames")


def error1(p0: PignisticDist, papp: PignisticDist) -> float:
    """Largest deviation over all events, i.e. total variation distance.

    For additive measures the maximizing event is the set of elements where
    ``p0`` exceeds ``papp``, so no subset enumeration is needed.
    """
    _same_frame(p0, papp)
    diff = p0.probs - papp.probs
    return float(min(np.sum(diff[diff > 0.0]), 1.0))


def error1_bruteforce(p0: PignisticDist, papp: PignisticDist) -> float:
    """Exhaustive max over all subsets; only practical for small frames."""
    _same_frame(p0, papp)
    diff = (p0.probs - papp.probs).tolist()
    best = 0.0
    for bits in range(1 << len(diff)):
        total = 0.0
        for i, d in enumerate(diff):
            if bits >> i & 1:
                total += d
        best = max(best, abs(total))
    return best


def decide(p: PignisticDist) -> DecisionReport:
    """Best element and full ranking (probability descending, index ascending)."""
    ranking = tuple(sorted(range(p.frame.size), key=lambda i: (-p.probs[i], i)))
    return DecisionReport(ranking[0], ranking)


def error23(p0: PignisticDist, papp: PignisticDist) -> tuple[int, int]:
    """Rank of the true optimum under ``papp`` and of the chosen element under ``p0``.

    Both are counts of elements that are strictly better.
    """
    _same_frame(p0, papp)
    x0 = decide(p0).best_index
    xapp = decide(papp).best_index
    e2 = int(np.count_nonzero(papp.probs > papp.probs[x0]))
    e3 = int(np.count_nonzero(p0.probs > p0.probs[xapp]))
    return e2, e3


def error_triple(p0: PignisticDist, papp: PignisticDist) -> ErrorTriple:
    e2, e3 = error23(p0, papp)
    return ErrorTriple(error1(p0, papp), e2, e3)
