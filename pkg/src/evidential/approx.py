"""Focal-element reduction: Bayesian, k-l-x, summarization and D1.

All four methods share one selection order for "highest valued" focal
elements: mass descending, then cardinality ascending, then bitmask
ascending. The order is total, so every method is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

from . import _backend
from .core import Bpa, renormalized

# (source bits, destination bits, amount) for each redistributed share in D1
TraceFn = Callable[[int, int, float], None]


def ranked_focal_sets(m: Bpa) -> list[int]:
    """Focal bitmasks from highest to lowest mass, ties broken deterministically."""
    return sorted(m.masses, key=lambda b: (-m.masses[b], b.bit_count(), b))


def approx_bayesian(m: Bpa) -> Bpa:
    """Project ``m`` onto singletons, proportionally to singleton plausibility."""
    masks, vals = m._arrays()
    support, weighted = _backend.singleton_support(masks, vals, m.frame.size)
    return Bpa(m.frame, {1 << i: s / weighted for i, s in enumerate(support.tolist()) if s > 0.0})


def approx_klx(m: Bpa, k: int = 1, l: Optional[int] = None, x: float = 0.0) -> Bpa:
    """Keep the top focal elements, at least ``k`` and at most ``l`` of them,
    until the kept mass reaches ``1 - x``; then renormalize.

    ``l=None`` means unbounded. ``x=1.0`` switches the mass criterion off,
    which leaves exactly ``k`` elements.
    """
    _check_klx(k, l, x)
    kept: dict[int, float] = {}
    total = 0.0
    f = 0
    for bits in ranked_focal_sets(m):
        if l is not None and f >= l:
            break
        if not (f < k or total < 1.0 - x):
            break
        mass = m.masses[bits]
        kept[bits] = mass
        total += mass
        f += 1
    if len(kept) == len(m):
        return m
    return renormalized(m.frame, kept)


def approx_summarize(m: Bpa, k: int) -> Bpa:
    """Keep the ``k - 1`` best focal elements; pool the rest on their union."""
    if k < 1:
        raise ValueError(f"summarization needs k >= 1, got {k}")
    if len(m) <= k:
        return m
    ranked = ranked_focal_sets(m)
    out = {b: m.masses[b] for b in ranked[: k - 1]}
    union = 0
    pooled = []
    for b in ranked[k - 1:]:
        union |= b
        pooled.append(m.masses[b])
    out[union] = out.get(union, 0.0) + math.fsum(pooled)
    return Bpa(m.frame, out)


def approx_d1(m: Bpa, k: int, trace: Optional[TraceFn] = None) -> Bpa:
    """Keep the ``k - 1`` best focal elements and push every other mass onto
    the smallest kept sets that cover it, with leftovers going to the frame.
    """
    if k < 2:
        raise ValueError(f"D1 needs k >= 2, got {k}")
    theta = m.frame.full
    ranked = ranked_focal_sets(m)
    keep = ranked[: k - 1]
    # theta already carries its own mass into the result; redistributing it too would count it twice
    removed = [b for b in ranked[k - 1:] if b != theta]
    if not removed:
        return m
    acc = {b: m.masses[b] for b in keep}
    acc[theta] = m.masses.get(theta, 0.0)
    for a in removed:
        _distribute(a, m.masses[a], a.bit_count(), keep, theta, acc, trace)
    return Bpa(m.frame, {b: v for b, v in acc.items() if v > 0.0})


def _distribute(a, val, limit, keep, theta, acc, trace):
    while True:
        size_a = a.bit_count()
        supersets = [b for b in keep if a & ~b == 0 and b != a]
        if supersets:
            smallest = min(b.bit_count() for b in supersets)
            targets = [b for b in supersets if b.bit_count() == smallest]
            share = val / len(targets)
            for b in targets:
                acc[b] += share
                if trace:
                    trace(a, b, share)
            return
        overlapping = [b for b in keep if b.bit_count() >= limit and b & a]
        if not overlapping:
            acc[theta] += val
            if trace:
                trace(a, theta, val)
            return
        smallest = min(b.bit_count() for b in overlapping)
        targets = [b for b in overlapping if b.bit_count() == smallest]
        covered = 0
        number = 0
        for b in targets:
            covered |= b & a
            number += (b & a).bit_count()
        ratio = covered.bit_count() / size_a
        handed_out = 0.0
        for b in targets:
            share = ((b & a).bit_count() / number) * ratio * val
            acc[b] += share
            handed_out += share
            if trace:
                trace(a, b, share)
        if ratio >= 1.0:
            return
        rest = a & ~covered
        if not rest:
            return
        a, val = rest, val - handed_out


def _check_klx(k, l, x):
    if k < 1:
        raise ValueError(f"k-l-x needs k >= 1, got {k}")
    if l is not None and l < k:
        raise ValueError(f"k-l-x needs k <= l, got k={k}, l={l}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"k-l-x needs 0 <= x <= 1, got {x}")


@dataclass(frozen=True)
class Bayesian:
    def __call__(self, m: Bpa) -> Bpa:
        return approx_bayesian(m)

    def max_focal(self, frame_size: int) -> int:
        return frame_size


@dataclass(frozen=True)
class KLX:
    k: int = 1
    l: Optional[int] = None
    x: float = 0.0

    def __post_init__(self):
        _check_klx(self.k, self.l, self.x)

    def __call__(self, m: Bpa) -> Bpa:
        return approx_klx(m, self.k, self.l, self.x)

    def max_focal(self, frame_size: int) -> Optional[int]:
        return self.l


@dataclass(frozen=True)
class Summarize:
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"summarization needs k >= 1, got {self.k}")

    def __call__(self, m: Bpa) -> Bpa:
        return approx_summarize(m, self.k)

    def max_focal(self, frame_size: int) -> int:
        return self.k


@dataclass(frozen=True)
class D1:
    k: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"D1 needs k >= 2, got {self.k}")

    def __call__(self, m: Bpa) -> Bpa:
        return approx_d1(m, self.k)

    def max_focal(self, frame_size: int) -> int:
        return self.k


ApproxMethod = Union[Bayesian, KLX, Summarize, D1]


def default_method_suite() -> dict[str, ApproxMethod]:
    """The seven instantiations compared in the empirical study."""
    return {
        "D1_8": D1(8),
        "D1_30": D1(30),
        "Summ_8": Summarize(8),
        "Summ_30": Summarize(30),
        "Bayes": Bayesian(),
        "klx_01": KLX(1, None, 0.01),
        # a literal x = 1.0 would keep a single element; 1.0 is read as one percent
        "klx_30": KLX(1, 30, 0.01),
    }


def method_from_name(name: str) -> ApproxMethod:
    """Resolve a method name.

    Accepts the suite names case-insensitively plus the parametric forms
    ``D1_<k>``, ``Summ_<k>`` and ``klx:<k>:<l|inf>:<x>``.
    """
    suite = {n.lower(): meth for n, meth in default_method_suite().items()}
    key = name.strip().lower()
    if key in suite:
        return suite[key]
    if key in ("bayes", "bayesian"):
        return Bayesian()
    try:
        if key.startswith("d1_"):
            return D1(int(key[3:]))
        if key.startswith("summ_"):
            return Summarize(int(key[5:]))
        if key.startswith("klx:"):
            k, l, x = key[4:].split(":")
            return KLX(int(k), None if l in ("inf", "") else int(l), float(x))
    except ValueError as exc:
        raise ValueError(f"bad method {name!r}: {exc}") from None
    raise ValueError(f"unknown method {name!r}")


def canonical_name(name: str) -> str:
    """Map suite names to their canonical spelling; leave others as given."""
    for n in default_method_suite():
        if n.lower() == name.strip().lower():
            return n
    if name.strip().lower() in ("bayes", "bayesian"):
        return "Bayes"
    return name.strip()
