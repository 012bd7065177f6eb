import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import as_sets, bpas, mask_sets, oracle_bayesian, oracle_d1, random_bayesian, random_bpa
from evidential import (
    D1,
    KLX,
    Bayesian,
    Frame,
    Summarize,
    TotalConflict,
    approx_bayesian,
    approx_d1,
    approx_klx,
    approx_summarize,
    combine,
    default_method_suite,
    make_bpa,
    method_from_name,
    vacuous,
)
from evidential.approx import _distribute, ranked_focal_sets
from evidential.core import EPS_MASS

EPS = 1e-9


def S(labels):
    return frozenset(labels)


class TestBayesian:
    def test_eq1_formula(self, eq1):
        # plausibility of each singleton over sum m(C)|C| = 2.2
        out = as_sets(approx_bayesian(eq1))
        expected = {S("a"): 0.8 / 2.2, S("b"): 0.5 / 2.2, S("c"): 0.45 / 2.2, S("d"): 0.4 / 2.2, S("e"): 0.05 / 2.2}
        assert out == pytest.approx(expected, abs=1e-12)

    def test_eq1_rounded_to_two_significant_digits(self, eq1):
        out = as_sets(approx_bayesian(eq1))
        printed = {S("a"): 0.36, S("b"): 0.23, S("c"): 0.20, S("d"): 0.18, S("e"): 0.023}
        assert {s: float(f"{v:.2g}") for s, v in out.items()} == printed

    def test_bayesian_input_unchanged(self, rng):
        m = random_bayesian(rng, Frame.of_size(6))
        assert approx_bayesian(m).isclose(m, EPS)

    def test_vacuous_goes_uniform(self):
        out = approx_bayesian(vacuous(Frame.of_size(7)))
        assert len(out) == 7
        assert all(v == pytest.approx(1 / 7) for v in out.masses.values())

    @settings(max_examples=200, deadline=None)
    @given(bpas(max_size=8, max_focal=10))
    def test_matches_oracle(self, m):
        got = mask_sets(approx_bayesian(m))
        expected = oracle_bayesian(mask_sets(m), range(m.frame.size))
        assert got == pytest.approx(expected, abs=EPS)
        assert len(got) <= m.frame.size

    def test_homomorphism_and_absorption(self, rng):
        f = Frame.of_size(5)
        checked = 0
        while checked < 300:
            m1, m2 = random_bpa(rng, f), random_bpa(rng, f)
            b1 = random_bayesian(rng, f)
            try:
                lhs = approx_bayesian(combine(m1, m2))
                rhs = combine(approx_bayesian(m1), approx_bayesian(m2))
                absorbed = combine(b1, m2)
            except TotalConflict:
                continue
            assert lhs.isclose(rhs, EPS)
            assert approx_bayesian(absorbed).isclose(absorbed, EPS)
            checked += 1


class TestKLX:
    def test_eq1(self, eq1):
        out = as_sets(approx_klx(eq1, 2, 3, 0.1))
        assert out == pytest.approx({S("ab"): 0.5 / 0.9, S("acd"): 0.3 / 0.9, S("c"): 0.1 / 0.9}, abs=EPS)
        assert out[S("ab")] == pytest.approx(0.5556, abs=1e-4)

    def test_keep_everything(self, eq1):
        assert approx_klx(eq1, 1, None, 0.0) == eq1

    def test_hand_trace(self):
        # f=0 -> add {a} (total .9); f=1 >= l=1 stops the loop
        m = make_bpa(Frame("ab"), [(["a"], 0.9), (["b"], 0.1)])
        assert as_sets(approx_klx(m, 1, 1, 0.5)) == {S("a"): 1.0}

    def test_x_one_keeps_k(self, eq1):
        assert len(approx_klx(eq1, 2, None, 1.0)) == 2

    @pytest.mark.parametrize("k,l,x", [(0, None, 0.1), (3, 2, 0.1), (1, None, -0.1), (1, None, 1.5)])
    def test_bad_parameters(self, k, l, x):
        with pytest.raises(ValueError):
            KLX(k, l, x)

    @settings(max_examples=300, deadline=None)
    @given(bpas(max_size=6, max_focal=20), st.integers(1, 5), st.integers(0, 6), st.floats(0.0, 0.99))
    def test_bounds(self, m, k, extra, x):
        l = k + extra
        out = approx_klx(m, k, l, x)
        assert min(k, len(m)) <= len(out) <= l
        assert abs(out.total() - 1.0) <= EPS_MASS
        kept = ranked_focal_sets(m)[: len(out)]
        assert set(out.masses) == set(kept)
        # the kept mass reached 1 - x unless l or running out stopped it
        if len(out) < min(l, len(m)) and len(out) > k:
            assert math.fsum(m.masses[b] for b in kept) >= 1 - x - 1e-12


class TestSummarize:
    def test_eq1(self, eq1):
        assert as_sets(approx_summarize(eq1, 3)) == pytest.approx(
            {S("ab"): 0.5, S("acd"): 0.3, S("cde"): 0.2}, abs=EPS
        )

    def test_n_equals_k(self, eq1):
        assert approx_summarize(eq1, 5) is eq1

    def test_union_example(self):
        m = make_bpa(Frame("abc"), [(["a"], 0.4), (["b"], 0.3), (["c"], 0.2), (["a", "b"], 0.1)])
        assert as_sets(approx_summarize(m, 2)) == pytest.approx({S("a"): 0.4, S("abc"): 0.6}, abs=EPS)

    def test_union_collides_with_kept(self):
        # rest = {a} and {b}; union {a,b} is already kept
        m = make_bpa(Frame("abc"), [(["a", "b"], 0.5), (["a"], 0.3), (["b"], 0.2)])
        assert as_sets(approx_summarize(m, 2)) == pytest.approx({S("ab"): 1.0})

    @settings(max_examples=300, deadline=None)
    @given(bpas(max_size=8, max_focal=30), st.integers(1, 10))
    def test_conserves_mass_and_bound(self, m, k):
        out = approx_summarize(m, k)
        assert len(out) <= k
        assert abs(out.total() - m.total()) <= 1e-12
        top = ranked_focal_sets(m)[: k - 1]
        for b in top:
            assert out.masses[b] >= m.masses[b]


class TestD1:
    def test_eq1(self, eq1):
        assert as_sets(approx_d1(eq1, 3)) == pytest.approx(
            {S("ab"): 0.5, S("acd"): 0.475, S("abcde"): 0.025}, abs=EPS
        )

    def test_small_input_unchanged(self, eq1):
        assert approx_d1(eq1, 6) is eq1

    def test_case1_hand_trace(self):
        m = make_bpa(Frame("abcd"), [(["a", "b"], 0.6), (["c", "d"], 0.3), (["c"], 0.1)])
        assert as_sets(approx_d1(m, 3)) == pytest.approx({S("ab"): 0.6, S("cd"): 0.4}, abs=EPS)

    def test_k_too_small(self):
        with pytest.raises(ValueError):
            D1(1)

    def test_theta_in_removed_part_not_double_counted(self):
        f = Frame("abc")
        m = make_bpa(f, [(["a"], 0.5), (["b"], 0.3), (["a", "b", "c"], 0.1), (["c"], 0.1)])
        out = approx_d1(m, 2)
        assert out.total() == pytest.approx(1.0, abs=1e-12)
        assert as_sets(out) == pytest.approx({S("a"): 0.5, S("abc"): 0.5})


class TestDistribute:
    def _run(self, frame, a, val, limit, keep):
        theta = frame.full
        keep = [frame.mask(b) for b in keep]
        acc = {b: 0.0 for b in keep}
        acc.setdefault(theta, 0.0)
        _distribute(frame.mask(a), val, limit, keep, theta, acc, None)
        return {frozenset(frame.labels(b)): v for b, v in acc.items() if v}

    def test_partial_cover_then_theta(self, frame5):
        out = self._run(frame5, "de", 0.05, 2, ["ab", "acd"])
        assert out == pytest.approx({S("acd"): 0.025, S("abcde"): 0.025}, abs=1e-15)

    def test_single_superset(self, frame5):
        assert self._run(frame5, "c", 0.1, 1, ["ab", "acd"]) == pytest.approx({S("acd"): 0.1})

    def test_uniform_split(self, frame5):
        out = self._run(frame5, "c", 0.1, 1, ["ac", "bc"])
        assert out == pytest.approx({S("ac"): 0.05, S("bc"): 0.05})


class TestD1Properties:
    @settings(max_examples=300, deadline=None)
    @given(bpas(min_size=2, max_size=7, max_focal=25), st.integers(2, 8))
    def test_matches_oracle(self, m, k):
        theta = frozenset(range(m.frame.size))
        expected = oracle_d1(mask_sets(m), k, theta)
        got = mask_sets(approx_d1(m, k))
        assert got == pytest.approx(expected, abs=1e-12)

    @settings(max_examples=300, deadline=None)
    @given(bpas(min_size=2, max_size=7, max_focal=25), st.integers(2, 8))
    def test_conservative_and_bounded(self, m, k):
        moves = []
        out = approx_d1(m, k, trace=lambda src, dst, amt: moves.append((src, dst, amt)))
        theta = m.frame.full
        assert len(out) <= k
        assert abs(out.total() - m.total()) <= 1e-12
        for src, dst, amt in moves:
            assert amt >= 0
            assert dst == theta or dst.bit_count() >= src.bit_count()
        for b in ranked_focal_sets(m)[: k - 1]:
            assert out.masses[b] >= m.masses[b]


class TestMethods:
    def test_suite(self):
        suite = default_method_suite()
        assert list(suite) == ["D1_8", "D1_30", "Summ_8", "Summ_30", "Bayes", "klx_01", "klx_30"]
        assert suite["D1_8"] == D1(8)
        assert suite["D1_30"] == D1(30)
        assert suite["Summ_30"] == Summarize(30)
        assert suite["Bayes"] == Bayesian()
        assert suite["klx_01"] == KLX(1, None, 0.01)
        assert suite["klx_30"].l == 30

    @pytest.mark.parametrize(
        "name,expected",
        [("bayes", Bayesian()), ("D1_8", D1(8)), ("d1_12", D1(12)), ("summ_4", Summarize(4)),
         ("klx:2:inf:0.05", KLX(2, None, 0.05)), ("KLX:1:10:0.1", KLX(1, 10, 0.1))],
    )
    def test_names(self, name, expected):
        assert method_from_name(name) == expected

    @pytest.mark.parametrize("name", ["nope", "d1_1", "summ_x", "klx:1:2"])
    def test_bad_names(self, name):
        with pytest.raises(ValueError):
            method_from_name(name)

    @pytest.mark.parametrize("method", list(default_method_suite().values()))
    def test_all_methods_give_valid_bpas(self, method, rng):
        f = Frame.of_size(8)
        for _ in range(50):
            m = random_bpa(rng, f, max_focal=60)
            out = method(m)
            assert 0 not in out.masses
            assert all(v > 0 for v in out.masses.values())
            assert abs(out.total() - 1.0) <= EPS_MASS
            bound = method.max_focal(f.size)
            if bound is not None:
                assert len(out) <= bound

    @pytest.mark.parametrize("method", [D1(8), Summarize(8), KLX(1, 8, 0.0), Bayesian()])
    def test_idempotent_within_bounds(self, method, rng):
        f = Frame.of_size(6)
        m = random_bpa(rng, f, max_focal=7) if not isinstance(method, Bayesian) else random_bayesian(rng, f)
        assert method(m).isclose(m, EPS)
