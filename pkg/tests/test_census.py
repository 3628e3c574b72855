"""Tests for mod-2 zero counting and the Euler cross-check."""
from __future__ import annotations

import pytest

from symsemi.census import (
    MissingSigns,
    OddDimension,
    Zero,
    ZeroCensus,
    counting_check,
    euler_cross_check,
)


def census_of(signs, nonvanishing=False, source="test"):
    zeros = tuple(Zero(f"p{i}", s) for i, s in enumerate(signs))
    return ZeroCensus(source, nonvanishing, zeros)


def test_counting_passes_with_four_positive_zeros():
    verdict = counting_check(0, census_of("++++"), 4)
    assert verdict.status == "pass"
    assert verdict.passed
    assert verdict.zero_count == 4
    assert verdict.parity_match


def test_counting_fails_on_parity_mismatch():
    verdict = counting_check(1, census_of("++++"), 4)
    assert verdict.status == "fail"
    assert not verdict.passed
    assert "4 zeros" in verdict.detail


def test_counting_with_nonvanishing_field():
    census = census_of("", nonvanishing=True)
    assert counting_check(0, census, 4).status == "pass"
    assert counting_check(1, census, 4).status == "fail"
    assert census.count() == 0


def test_counting_not_applicable_in_dimension_two():
    # The counting statement carries no verdict when dim = 2 mod 4; the
    # mismatch (k = 1 against an even zero count) is still reported.
    verdict = counting_check(1, census_of(["unknown"] * 4), 2)
    assert verdict.status == "not_applicable"
    assert verdict.passed            # not a failure, just no statement
    assert not verdict.parity_match
    assert "k = 1" in verdict.detail and "0" in verdict.detail


def test_counting_rejects_odd_dimension():
    with pytest.raises(OddDimension):
        counting_check(0, census_of("+"), 3)


def test_counting_rejects_unreduced_semi_characteristic():
    with pytest.raises(ValueError):
        counting_check(2, census_of("++"), 4)


def test_counting_depends_only_on_parity_data():
    # Labels, signs and ordering never influence the verdict; only the
    # count mod 2, k, and the dimension class do.
    a = ZeroCensus("morse", False, (Zero("n", "+"), Zero("s", "-")))
    b = ZeroCensus("other", False, (Zero("x1", "unknown"),
                                    Zero("x0", "unknown")))
    va = counting_check(0, a, 4)
    vb = counting_check(0, b, 4)
    assert (va.status, va.zero_count, va.parity_match) == \
        (vb.status, vb.zero_count, vb.parity_match)
    assert counting_check(0, a, 8).status == va.status
    # Same parity, different count: same status, different bookkeeping.
    c = census_of("++++")
    assert counting_check(0, c, 4).status == va.status
    assert counting_check(0, c, 4).zero_count != va.zero_count


def test_census_guards():
    with pytest.raises(ValueError):
        ZeroCensus("bad", True, (Zero("p0", "+"),))
    with pytest.raises(ValueError):
        Zero("p0", "++")
    assert Zero("p0").det_sign == "unknown"
    assert census_of("+-+").count() == 3


def test_euler_cross_check_examples():
    assert euler_cross_check(census_of("++++"), 4).passed
    assert euler_cross_check(census_of("++++"), 4).signed_sum == 4
    assert euler_cross_check(census_of("", nonvanishing=True), 0).passed
    assert euler_cross_check(census_of("+-"), 0).passed
    bad = euler_cross_check(census_of("++"), 4)
    assert not bad.passed
    assert "signed zero count 2" in bad.detail
    assert not euler_cross_check(census_of("", nonvanishing=True), 2).passed


def test_euler_cross_check_requires_signs():
    with pytest.raises(MissingSigns):
        euler_cross_check(census_of(["+", "unknown"]), 0)


def test_two_censuses_for_one_model_agree():
    # A nonvanishing field and a Morse-type field with cancelling signs
    # tell the same parity story on a 4-dimensional model with chi = 0.
    nonvan = census_of("", nonvanishing=True, source="invariant field")
    morse = census_of("++--", source="morse field")
    assert counting_check(0, nonvan, 4).status == "pass"
    assert counting_check(0, morse, 4).status == "pass"
    assert euler_cross_check(nonvan, 0).passed
    assert euler_cross_check(morse, 0).passed
