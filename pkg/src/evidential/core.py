"""Frames, focal sets, basic probability assignments and Dempster's rule.

Subsets of a frame are stored as integer bitmasks: bit ``i`` stands for the
``i``-th element of the frame. Frames are capped at 64 elements so a focal
set always fits in one machine word.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from . import _backend

EPS_MASS = 1e-9
EPS_PRUNE = 1e-12
MAX_FRAME = 64


class EvidentialError(Exception):
    """Base class for all errors raised by this package."""


class EmptyFocalSet(EvidentialError):
    pass


class MassNotNormalized(EvidentialError):
    pass


class InvalidMass(EvidentialError):
    pass


class OutOfFrame(EvidentialError):
    pass


class UnknownElement(OutOfFrame):
    pass


class FrameMismatch(EvidentialError):
    pass


class TotalConflict(EvidentialError):
    pass


class Frame:
    """An ordered frame of discernment with distinct string labels."""

    __slots__ = ("elements", "_index", "full")

    def __init__(self, elements: Iterable[str]):
        elements = tuple(str(e) for e in elements)
        if not 1 <= len(elements) <= MAX_FRAME:
            raise ValueError(f"frame size must be in 1..{MAX_FRAME}, got {len(elements)}")
        index = {label: i for i, label in enumerate(elements)}
        if len(index) != len(elements):
            raise ValueError("frame labels must be distinct")
        self.elements = elements
        self._index = index
        self.full = (1 << len(elements)) - 1

    @classmethod
    def of_size(cls, n: int, prefix: str = "x") -> "Frame":
        return cls(f"{prefix}{i}" for i in range(n))

    @property
    def size(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[str]:
        return iter(self.elements)

    def __eq__(self, other) -> bool:
        return isinstance(other, Frame) and self.elements == other.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def __repr__(self) -> str:
        return f"Frame({list(self.elements)!r})"

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownElement(f"unknown element {label!r}") from None

    def mask(self, labels: Iterable[str]) -> int:
        bits = 0
        for label in labels:
            bits |= 1 << self.index(label)
        return bits

    def labels(self, bits: int) -> tuple[str, ...]:
        return tuple(self.elements[i] for i in iter_bits(bits))

    def subset(self, labels: Iterable[str]) -> "FocalSet":
        return FocalSet(self.mask(labels), self.size)

    @property
    def theta(self) -> "FocalSet":
        return FocalSet(self.full, self.size)


def iter_bits(bits: int) -> Iterator[int]:
    """Yield the indices of the set bits in ascending order."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


@dataclass(frozen=True, order=True)
class FocalSet:
    """A subset of a frame of size ``size``, as a bitmask."""

    bits: int
    size: int = field(default=MAX_FRAME)

    def __post_init__(self):
        if not 1 <= self.size <= MAX_FRAME:
            raise ValueError(f"frame size must be in 1..{MAX_FRAME}")
        if self.bits < 0 or self.bits >> self.size:
            raise OutOfFrame(f"bitmask {self.bits:#x} has bits outside a frame of size {self.size}")

    def _check(self, other: "FocalSet") -> None:
        if self.size != other.size:
            raise FrameMismatch("focal sets belong to frames of different size")

    def __and__(self, other: "FocalSet") -> "FocalSet":
        self._check(other)
        return FocalSet(self.bits & other.bits, self.size)

    def __or__(self, other: "FocalSet") -> "FocalSet":
        self._check(other)
        return FocalSet(self.bits | other.bits, self.size)

    def __sub__(self, other: "FocalSet") -> "FocalSet":
        self._check(other)
        return FocalSet(self.bits & ~other.bits, self.size)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.bits)

    def __contains__(self, index: int) -> bool:
        return bool(self.bits >> index & 1)

    def issubset(self, other: "FocalSet") -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0


SetLike = Union[FocalSet, int, Iterable[str]]


def _to_mask(frame: Frame, s: SetLike) -> int:
    if isinstance(s, FocalSet):
        if s.size != frame.size:
            raise FrameMismatch(f"focal set of frame size {s.size} used with frame of size {frame.size}")
        return s.bits
    if isinstance(s, (int, np.integer)):
        bits = int(s)
        if bits < 0 or bits >> frame.size:
            raise OutOfFrame(f"bitmask {bits:#x} outside frame of size {frame.size}")
        return bits
    if isinstance(s, str):
        s = (s,)
    return frame.mask(s)


class Bpa:
    """A normalized basic probability assignment over a frame.

    Instances are immutable. ``masses`` maps focal bitmasks to strictly
    positive masses, ordered by ascending bitmask.
    """

    __slots__ = ("frame", "_masses")

    def __init__(self, frame: Frame, masses: Mapping[int, float]):
        full = frame.full
        clean = {}
        for bits, mass in sorted(masses.items()):
            bits = int(bits)
            mass = float(mass)
            if not math.isfinite(mass) or mass < 0.0:
                raise InvalidMass(f"mass must be a finite nonnegative number, got {mass!r}")
            if bits & ~full or bits < 0:
                raise OutOfFrame(f"bitmask {bits:#x} outside frame of size {frame.size}")
            if mass < EPS_PRUNE:
                continue
            if bits == 0:
                raise EmptyFocalSet("the empty set cannot carry mass")
            clean[bits] = mass
        total = math.fsum(clean.values())
        if abs(total - 1.0) > EPS_MASS:
            raise MassNotNormalized(f"masses sum to {total!r}, not 1")
        self.frame = frame
        self._masses = MappingProxyType(clean)

    @property
    def masses(self) -> Mapping[int, float]:
        return self._masses

    def __len__(self) -> int:
        return len(self._masses)

    def __iter__(self) -> Iterator[int]:
        return iter(self._masses)

    def __getitem__(self, s: SetLike) -> float:
        return self._masses.get(_to_mask(self.frame, s), 0.0)

    def items(self):
        return self._masses.items()

    def focal_sets(self) -> list[FocalSet]:
        return [FocalSet(bits, self.frame.size) for bits in self._masses]

    def total(self) -> float:
        return math.fsum(self._masses.values())

    def is_bayesian(self) -> bool:
        return all(bits & (bits - 1) == 0 for bits in self._masses)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Bpa)
            and self.frame == other.frame
            and dict(self._masses) == dict(other._masses)
        )

    def __hash__(self):
        return hash((self.frame, tuple(self._masses.items())))

    def __repr__(self) -> str:
        body = ", ".join(
            "{" + ",".join(self.frame.labels(bits)) + f"}}: {mass:.6g}"
            for bits, mass in self._masses.items()
        )
        return f"Bpa({body})"

    def isclose(self, other: "Bpa", tol: float = EPS_MASS) -> bool:
        """Same focal sets, masses equal within ``tol``."""
        if self.frame != other.frame or self._masses.keys() != other._masses.keys():
            return False
        return all(abs(v - other._masses[k]) <= tol for k, v in self._masses.items())

    def _arrays(self) -> tuple[list[int], list[float]]:
        return list(self._masses.keys()), list(self._masses.values())


def make_bpa(frame: Frame, assignments: Iterable[tuple[SetLike, float]]) -> Bpa:
    """Build a bpa from ``(set, mass)`` pairs; duplicate sets accumulate."""
    acc: dict[int, float] = {}
    for s, mass in assignments:
        bits = _to_mask(frame, s)
        mass = float(mass)
        if not math.isfinite(mass) or mass < 0.0:
            raise InvalidMass(f"mass must be a finite nonnegative number, got {mass!r}")
        if bits == 0 and mass > 0.0:
            raise EmptyFocalSet("the empty set cannot carry mass")
        if mass > 0.0:
            acc[bits] = acc.get(bits, 0.0) + mass
    return Bpa(frame, acc)


def vacuous(frame: Frame) -> Bpa:
    return Bpa(frame, {frame.full: 1.0})


def _check_frames(*bpas: Bpa) -> Frame:
    frame = bpas[0].frame
    for m in bpas[1:]:
        if m.frame != frame:
            raise FrameMismatch("bpas are defined over different frames")
    return frame


def renormalized(frame: Frame, masses: Mapping[int, float]) -> Bpa:
    """Prune negligible entries and rescale the rest to sum exactly to one."""
    total = math.fsum(masses.values())
    if total <= EPS_MASS:
        raise TotalConflict("no mass left to normalize")
    kept = {k: v for k, v in masses.items() if v / total >= EPS_PRUNE}
    total = math.fsum(kept.values())
    return Bpa(frame, {k: v / total for k, v in kept.items()})


def combine_with_conflict(m1: Bpa, m2: Bpa) -> tuple[Bpa, float]:
    """Dempster's rule; also returns the conflict mass ``K``.

    Products are accumulated per intersection and normalized once by the
    summed non-conflicting mass.
    """
    frame = _check_frames(m1, m2)
    a_masks, a_vals = m1._arrays()
    b_masks, b_vals = m2._arrays()
    products, conflict = _backend.combine_masses(a_masks, a_vals, b_masks, b_vals)
    agreement = math.fsum(products.values())
    if agreement <= EPS_MASS:
        raise TotalConflict(f"total conflict (K = {conflict:.12g})")
    return renormalized(frame, products), conflict


def combine(m1: Bpa, m2: Bpa) -> Bpa:
    return combine_with_conflict(m1, m2)[0]


def combine_all(bpas: Sequence[Bpa]) -> Bpa:
    result = bpas[0]
    for m in bpas[1:]:
        result = combine(result, m)
    return result


def belief(m: Bpa, s: SetLike) -> float:
    a = _to_mask(m.frame, s)
    return math.fsum(v for b, v in m.items() if b & ~a == 0)


def plausibility(m: Bpa, s: SetLike) -> float:
    a = _to_mask(m.frame, s)
    return math.fsum(v for b, v in m.items() if b & a)


@dataclass(frozen=True, eq=False)
class PignisticDist:
    """Probability vector over the elements of a frame."""

    frame: Frame
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.shape != (self.frame.size,):
            raise ValueError(f"expected {self.frame.size} probabilities, got shape {probs.shape}")
        if np.any(probs < 0.0):
            raise InvalidMass("probabilities must be nonnegative")
        probs = probs.copy()
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def __getitem__(self, label: str) -> float:
        return float(self.probs[self.frame.index(label)])

    def prob(self, s: SetLike) -> float:
        """Additive probability of an arbitrary subset."""
        a = _to_mask(self.frame, s)
        return math.fsum(self.probs[i] for i in iter_bits(a))

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.frame.elements, self.probs.tolist()))


def pignistic(m: Bpa) -> PignisticDist:
    masks, vals = m._arrays()
    return PignisticDist(m.frame, _backend.pignistic_masses(masks, vals, m.frame.size))
