"""Shared fixtures and independent oracles.

The oracles here work on frozensets of labels and transcribe the textbook
formulas directly; they share no code with the bitmask implementation.
"""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

from evidential import Frame, make_bpa

ACCEPTANCE_LOG = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)


EQ1 = {
    frozenset("ab"): 0.50,
    frozenset("acd"): 0.30,
    frozenset("c"): 0.10,
    frozenset("cd"): 0.05,
    frozenset("de"): 0.05,
}


@pytest.fixture
def frame5():
    return Frame("abcde")


@pytest.fixture
def eq1(frame5):
    return make_bpa(frame5, [(sorted(s), v) for s, v in EQ1.items()])


def as_sets(m):
    """Bpa -> {frozenset of labels: mass}."""
    return {frozenset(m.frame.labels(bits)): v for bits, v in m.items()}


def random_bpa(rng, frame, max_focal=6):
    n = frame.size
    count = int(rng.integers(1, min(max_focal, 2**n - 1) + 1))
    masks = set()
    while len(masks) < count:
        masks.add(int(rng.integers(1, 2**n)))
    w = rng.random(count) + 1e-3
    w = w / w.sum()
    return make_bpa(frame, zip(sorted(masks), w.tolist()))


def random_bayesian(rng, frame):
    w = rng.random(frame.size) + 1e-3
    w = w / w.sum()
    return make_bpa(frame, [(1 << i, v) for i, v in enumerate(w.tolist())])


@st.composite
def bpas(draw, min_size=1, max_size=6, max_focal=6):
    n = draw(st.integers(min_size, max_size))
    frame = Frame.of_size(n)
    masks = draw(st.lists(st.integers(1, 2**n - 1), min_size=1, max_size=min(max_focal, 2**n - 1), unique=True))
    weights = draw(st.lists(st.floats(0.01, 1.0), min_size=len(masks), max_size=len(masks)))
    total = math.fsum(weights)
    return make_bpa(frame, [(m, w / total) for m, w in zip(masks, weights)])


# ---- oracles -------------------------------------------------------------


def oracle_combine(s1, s2):
    acc = {}
    conflict = 0.0
    for a, va in s1.items():
        for b, vb in s2.items():
            inter = a & b
            if inter:
                acc[inter] = acc.get(inter, 0.0) + va * vb
            else:
                conflict += va * vb
    return {k: v / (1.0 - conflict) for k, v in acc.items()}, conflict


def oracle_pignistic(sets, elements):
    return [sum(v / len(a) for a, v in sets.items() if x in a) for x in elements]


def oracle_bayesian(sets, elements):
    denom = sum(v * len(a) for a, v in sets.items())
    out = {}
    for x in elements:
        num = sum(v for a, v in sets.items() if x in a)
        if num > 0:
            out[frozenset([x])] = num / denom
    return out


def all_subsets(elements):
    for r in range(len(elements) + 1):
        yield from itertools.combinations(elements, r)


def oracle_error1(p0, papp):
    n = len(p0)
    return max(abs(sum(p0[i] - papp[i] for i in idx)) for idx in all_subsets(range(n)))


def rank_key(sets):
    return lambda a: (-sets[a], len(a), sum(1 << i for i in a))


def oracle_d1(sets, k, theta):
    """Straight transcription of the D1 distribute step on frozensets of element indices."""
    order = sorted(sets, key=rank_key(sets))
    plus = order[: k - 1]
    minus = [a for a in order[k - 1:] if a != theta]
    out = {b: sets[b] for b in plus}
    out[theta] = sets.get(theta, 0.0)

    def distribute(a, val, limit):
        m_a = [b for b in plus if a < b]
        if m_a:
            smallest = min(len(b) for b in m_a)
            hat = [b for b in m_a if len(b) == smallest]
            for b in hat:
                out[b] += val / len(hat)
            return
        m_prime = [b for b in plus if len(b) >= limit and a & b]
        if not m_prime:
            out[theta] += val
            return
        smallest = min(len(b) for b in m_prime)
        hat = [b for b in m_prime if len(b) == smallest]
        covered = frozenset().union(*(b & a for b in hat))
        ratio = len(covered) / len(a)
        number = sum(len(b & a) for b in hat)
        hlp = 0.0
        for b in hat:
            share = (len(b & a) / number) * ratio * val
            out[b] += share
            hlp += share
        if ratio < 1:
            rest = a - covered
            if rest:
                distribute(rest, val - hlp, limit)

    for a in minus:
        distribute(a, sets[a], len(a))
    return {b: v for b, v in out.items() if v > 0}


def mask_sets(m):
    """Bpa -> {frozenset of bit indices: mass}."""
    return {frozenset(i for i in range(m.frame.size) if bits >> i & 1): v for bits, v in m.items()}


def exact_fraction_pignistic(sets, n):
    return [sum((Fraction(v) / len(a) for a, v in sets.items() if i in a), Fraction(0)) for i in range(n)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)
