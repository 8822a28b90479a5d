import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import binomial_band
from reductionlab.errors import AllZeroAmplitudes, IndexOutOfRange
from reductionlab.quantum import (
    Amplitude,
    Branch,
    CMInternal,
    ObserverChain,
    Superposition,
    born_probabilities,
    first_reduction,
    normalize,
    reduce,
    second_reduction,
    select_index,
)


def sup(moduli, phases=None):
    phases = phases or [0.0] * len(moduli)
    return Superposition(tuple(Branch(str(i), Amplitude(m, ph)) for i, (m, ph) in enumerate(zip(moduli, phases))))


def moduli(s):
    return [b.amplitude.modulus for b in s]


class TestNormalize:
    def test_equal_pair(self):
        assert moduli(normalize(sup([1, 1]))) == pytest.approx([1 / math.sqrt(2)] * 2, abs=1e-15)

    def test_three_four_five(self):
        out = normalize(sup([0.3, 0.4]))
        assert moduli(out) == pytest.approx([0.6, 0.8], abs=1e-15)
        assert out.is_normalized()

    def test_single_branch(self):
        assert moduli(normalize(sup([0.2]))) == [1.0]

    def test_all_zero(self):
        with pytest.raises(AllZeroAmplitudes):
            normalize(sup([0.0, 0.0]))

    def test_keeps_labels_phases_valences_origins(self):
        s = Superposition((
            Branch("a", Amplitude(2.0, 0.3), 1.5, CMInternal(1, 2)),
            Branch("b", Amplitude(1.0, -1.0), 0.0),
        ))
        out = normalize(s)
        for before, after in zip(s, out):
            assert (after.label, after.amplitude.phase, after.valence, after.origin) == (
                before.label, before.amplitude.phase, before.valence, before.origin)
        assert out.branches[0].probability / out.branches[1].probability == pytest.approx(4.0)

    @settings(max_examples=300)
    @given(st.lists(st.floats(0, 1e6, allow_nan=False), min_size=1, max_size=50).filter(lambda m: any(x > 1e-150 for x in m)))
    def test_norm_property(self, mods):
        assert abs(normalize(sup(mods)).total_probability() - 1) < 1e-12


def test_superposition_rejects_duplicate_labels_and_empty():
    with pytest.raises(ValueError):
        Superposition((Branch("x", Amplitude(1)), Branch("x", Amplitude(0))))
    with pytest.raises(ValueError):
        Superposition(())


def test_branch_rejects_nonfinite_valence():
    with pytest.raises(ValueError):
        Branch("x", Amplitude(1), math.inf)


class TestBorn:
    def test_equal(self):
        s = sup([1 / math.sqrt(2)] * 2)
        assert [p for _, p in born_probabilities(s)] == pytest.approx([0.5, 0.5], abs=1e-15)

    def test_certain(self):
        assert [p for _, p in born_probabilities(sup([1, 0]))] == [1.0, 0.0]

    def test_squares(self):
        probs = [p for _, p in born_probabilities(sup([math.sqrt(0.25), math.sqrt(0.75)]))]
        assert probs == pytest.approx([0.25, 0.75], abs=1e-15)
        assert sum(probs) == pytest.approx(1, abs=1e-12)

    def test_order_follows_branches(self):
        s = Superposition.from_probabilities([0.1, 0.9], labels=["z", "a"])
        assert [lab for lab, _ in born_probabilities(s)] == ["z", "a"]


class TestReduce:
    def test_single_branch_always(self, rng):
        s = sup([1.0])
        assert all(reduce(s, rng) is s.branches[0] for _ in range(100))

    def test_frequency_matches_born(self):
        # Binomial oracle: 3-sigma band around 0.25 for 1e6 draws.
        n = 1_000_000
        u = np.random.default_rng(1).random(n)
        hits = np.count_nonzero(select_index([0.25, 0.75], u) == 0)
        assert abs(hits / n - 0.25) < binomial_band(0.25, n, 3)

    def test_reduce_uses_one_uniform_inverse_cdf(self):
        s = Superposition.from_probabilities([0.25, 0.75])
        a, b = np.random.default_rng(5), np.random.default_rng(5)
        for _ in range(200):
            picked = reduce(s, a)
            assert picked.label == ("0" if b.random() < 0.25 else "1")

    def test_zero_probability_branch_never_selected(self):
        u = np.array([0.0, 0.5, 0.999999])
        assert set(select_index([0.0, 1.0, 0.0], u).tolist()) == {1}

    def test_all_zero_propagates(self, rng):
        with pytest.raises(AllZeroAmplitudes):
            reduce(sup([0.0]), rng)

    @settings(max_examples=100)
    @given(st.lists(st.floats(0.01, 1), min_size=2, max_size=8), st.integers(0, 2**32), st.data())
    def test_phase_irrelevance(self, mods, seed, data):
        phases = data.draw(st.lists(st.floats(-10, 10), min_size=len(mods), max_size=len(mods)))
        a = normalize(sup(mods))
        b = normalize(sup(mods, phases))
        assert born_probabilities(a) == born_probabilities(b)
        ra, rb = np.random.default_rng(seed), np.random.default_rng(seed)
        assert [reduce(a, ra).label for _ in range(20)] == [reduce(b, rb).label for _ in range(20)]


class TestObserverChain:
    def chain(self, n):
        return ObserverChain.correlated([Amplitude(math.sqrt(1 / n))] * n)

    def test_first_reduction_three_entries(self):
        amps = [Amplitude(0.5), Amplitude(0.5), Amplitude(math.sqrt(0.5))]
        out = first_reduction(ObserverChain.correlated(amps), 1)
        assert out.entries == ((1, 1, 1),)
        assert out.amplitudes == (amps[1],)

    def test_first_reduction_single_entry_is_identity(self):
        c = self.chain(1)
        assert first_reduction(c, 0) == c

    def test_first_reduction_keeps_bare_coefficient(self):
        c = ObserverChain.correlated([math.sqrt(0.2), math.sqrt(0.8)])
        out = first_reduction(c, 1)
        assert out.amplitudes[0].modulus == pytest.approx(math.sqrt(0.8))

    def test_second_reduction_agrees(self):
        r1 = first_reduction(self.chain(3), 2)
        assert second_reduction(r1, 2) == r1
        assert second_reduction(r1, 1) is None

    def test_second_reduction_single_entry(self):
        c = self.chain(1)
        assert second_reduction(c, 0) == c

    def test_index_errors(self):
        c = self.chain(3)
        with pytest.raises(IndexOutOfRange):
            first_reduction(c, 3)
        with pytest.raises(IndexOutOfRange):
            first_reduction(c, -1)
        with pytest.raises(IndexOutOfRange):
            second_reduction(first_reduction(c, 0), 5)

    def test_pre_reduction_state_is_correlated(self):
        assert self.chain(4).is_correlated()

    def test_observer_agreement_exhaustive(self):
        for n in range(1, 9):
            c = self.chain(n)
            for k, m in itertools.product(range(n), repeat=2):
                assert (second_reduction(first_reduction(c, k), m) is not None) == (k == m)
