"""Tests for sequence generation, subsampling, and exact dilation."""
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lacdisp import errors
from lacdisp.seqgen import (
    DilationVector,
    LacunarySeq,
    PointSet,
    check_linear_independence,
    dilate_exact,
    dilate_mod1,
    gen_lacunary,
    subsample,
)


class TestGenLacunary:
    def test_geometric_powers_of_two(self):
        seq = gen_lacunary("geometric", count=5, base=2)
        assert seq.terms == (2, 4, 8, 16, 32)
        assert seq.growth_factor == 2

    def test_custom_certified_growth(self):
        # min of consecutive ratios: 7/3 < 20/7 < 61/20
        seq = gen_lacunary("custom", terms=[3, 7, 20, 61], r=2)
        assert seq.growth_factor == Fraction(7, 3)

    def test_custom_growth_violation(self):
        with pytest.raises(errors.GrowthViolation):
            gen_lacunary("custom", terms=[2, 3], r=2)

    def test_min_growth_certified_at_least_r(self):
        seq = gen_lacunary("min_growth", count=12, r=Fraction(5, 2))
        assert seq.growth_factor >= Fraction(5, 2)

    def test_not_increasing_rejected(self):
        with pytest.raises(errors.GrowthViolation):
            LacunarySeq((4, 4, 8), Fraction(2))

    def test_json_roundtrip_exact(self):
        seq = gen_lacunary("geometric", count=300, base=3)
        back = LacunarySeq.from_json(seq.to_json())
        assert back.terms == seq.terms

    @given(base=st.integers(2, 7), count=st.integers(1, 40))
    @settings(max_examples=30, deadline=None)
    def test_geometric_growth_invariant(self, base, count):
        seq = gen_lacunary("geometric", count=count, base=base)
        for a, b in zip(seq.terms, seq.terms[1:]):
            assert Fraction(b, a) >= seq.growth_factor


class TestSubsample:
    def test_stride_and_K(self):
        # ceil(log 20) = 3, stride = 12, K = floor(20/12) = 1
        seq = gen_lacunary("geometric", count=24, base=2)
        sub = subsample(seq, l=4, N=20)
        assert sub.K == 1
        assert sub.terms == (seq.terms[11],)  # a_12

    def test_base8_l1_accepted(self):
        # 8 > e**2 = 7.389..., so l = 1 suffices
        seq = gen_lacunary("geometric", count=60, base=8)
        sub = subsample(seq, l=1, N=20)
        assert sub.xi == pytest.approx(math.log(8))
        assert sub.xi > 2

    def test_base2_l1_rejected(self):
        seq = gen_lacunary("geometric", count=60, base=2)
        with pytest.raises(errors.InsufficientGrowth):
            subsample(seq, l=1, N=20)

    def test_parent_too_short(self):
        seq = gen_lacunary("geometric", count=5, base=8)
        with pytest.raises(errors.IndexOutOfRange):
            subsample(seq, l=1, N=64)

    def test_gap_invariant_exact(self):
        seq = gen_lacunary("geometric", count=200, base=3)
        sub = subsample(seq, l=2, N=64)
        bound = sub.xi * math.log(64)
        for a, b in zip(sub.terms, sub.terms[1:]):
            assert math.log(b) - math.log(a) >= bound


class TestLinearIndependence:
    def test_dominating_powers(self):
        seq = gen_lacunary("custom", terms=[2 ** 10, 2 ** 30, 2 ** 50])
        sub = _as_subsample(seq)
        assert check_linear_independence(sub, 1, 10) is True

    def test_small_terms_fail(self):
        seq = gen_lacunary("custom", terms=[1, 2, 3])
        sub = _as_subsample(seq)
        assert check_linear_independence(sub, 1, 10) is False

    def test_single_term_vacuous(self):
        seq = gen_lacunary("custom", terms=[17])
        sub = _as_subsample(seq)
        assert check_linear_independence(sub, 1, 10) is True

    def test_soundness_by_enumeration(self):
        # when the inequality holds, no small-coefficient combination vanishes
        seq = gen_lacunary("geometric", count=40, base=9)
        sub = subsample(seq, l=1, N=16)
        terms = sub.terms[:4]
        assert check_linear_independence(sub, 1, 4)
        bound = 1 * 4 * 4
        found = _exhaustive_vanishing(terms, bound)
        assert found == 0

    def test_enumeration_catches_dependence(self):
        # sanity of the oracle itself: 1*1 + 1*2 - 1*3 = 0
        assert _exhaustive_vanishing((1, 2, 3), 2) > 0


def _as_subsample(seq):
    """Wrap a sequence as a SubsampledSeq without the growth precondition."""
    from lacdisp.seqgen import SubsampledSeq

    return SubsampledSeq(parent=seq, l=1, N=2, terms=seq.terms, xi=3.0)


def _exhaustive_vanishing(terms, bound):
    """Count nonzero coefficient vectors with |c_j| <= bound that vanish."""
    import itertools

    hits = 0
    for coeffs in itertools.product(range(-bound, bound + 1), repeat=len(terms)):
        if all(c == 0 for c in coeffs):
            continue
        if sum(c * t for c, t in zip(coeffs, terms)) == 0:
            hits += 1
    return hits


class TestDilationVector:
    def test_from_fractions(self):
        v = DilationVector.from_fractions([Fraction(1, 3)], bits=256)
        assert abs(v.as_floats()[0] - 1 / 3) < 1e-15

    def test_precision_guard(self):
        v = DilationVector.from_fractions([Fraction(1, 3)], bits=70)
        with pytest.raises(errors.PrecisionTooLow):
            v.check_precision(2 ** 10)  # needs 10 + 64 < 75 > 70

    def test_random_deterministic(self):
        a = DilationVector.random(2, 200, np.random.default_rng(5))
        b = DilationVector.random(2, 200, np.random.default_rng(5))
        assert a == b


class TestDilate:
    def test_half_gives_zero(self):
        v = DilationVector.from_fractions([Fraction(1, 2)], bits=128)
        ps = dilate_mod1([2, 4, 8], v)
        assert np.all(ps.points == 0.0)

    def test_one_third(self):
        v = DilationVector.from_fractions([Fraction(1, 3)], bits=256)
        ps = dilate_mod1([2, 4], v)
        assert ps.points[:, 0] == pytest.approx([2 / 3, 1 / 3], abs=1e-15)

    def test_bit_shift_oracle_powers_of_two(self):
        # for a_n = 2**n, frac(alpha * a_n) is the mantissa shifted left by n;
        # compare the multiply-and-mask path against explicit bit surgery
        rng = np.random.default_rng(42)
        bits = 512 + 100 + 64
        v = DilationVector.random(1, bits, rng)
        terms = [2 ** n for n in range(1, 101)]
        exact = dilate_exact(terms, v)
        m = v.mantissas[0]
        for n, row in zip(range(1, 101), exact):
            tail = (m % (1 << (bits - n))) << n
            assert row[0] == tail

    def test_exactness_matches_rational_arithmetic(self):
        # fixed-point dilation agrees with exact Fraction arithmetic on the
        # stored fixed-point value of alpha
        rng = np.random.default_rng(7)
        v = DilationVector.random(2, 300, rng)
        terms = gen_lacunary("geometric", count=30, base=3).terms
        ps = dilate_mod1(terms, v)
        top = 1 << v.precision_bits
        for n, a in enumerate(terms):
            for i in range(2):
                want = Fraction(v.mantissas[i] * a, top) % 1
                assert ps.points[n, i] == pytest.approx(float(want), abs=1e-15)

    def test_determinism_bit_identical(self):
        rng1 = np.random.default_rng(11)
        rng2 = np.random.default_rng(11)
        t = gen_lacunary("geometric", count=50, base=3).terms
        p1 = dilate_mod1(t, DilationVector.random_for_terms(2, t[-1], rng1))
        p2 = dilate_mod1(t, DilationVector.random_for_terms(2, t[-1], rng2))
        assert np.array_equal(p1.points, p2.points)

    def test_precision_too_low(self):
        v = DilationVector.from_fractions([Fraction(1, 3)], bits=80)
        with pytest.raises(errors.PrecisionTooLow):
            dilate_mod1([2 ** 100], v)

    @given(st.integers(0, 2 ** 64 - 1))
    @settings(max_examples=50, deadline=None)
    def test_coordinates_in_unit_interval(self, m):
        v = DilationVector((m,), 64 + 70)
        ps = dilate_mod1([3, 9, 27, 81], v)
        assert np.all((ps.points >= 0) & (ps.points < 1))


class TestPointSetIO:
    def test_csv_roundtrip(self, tmp_path):
        rng = np.random.default_rng(0)
        ps = PointSet(2, rng.random((20, 2)), {"seed": 0, "sequence": "geometric(3)"})
        path = tmp_path / "pts.csv"
        ps.to_csv(path)
        back = PointSet.from_csv(path)
        assert back.dim == 2
        assert np.array_equal(back.points, ps.points)  # 17 sig digits round-trips
        assert back.meta["sequence"] == "geometric(3)"
