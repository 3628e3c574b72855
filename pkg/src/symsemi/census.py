"""Mod-2 bookkeeping for censuses of vector-field zeros.

A census records the zeros of a vector field (labels plus the sign of the
Jacobian determinant at each zero) or the fact that the field never
vanishes.  ``counting_check`` compares the semi-characteristic with the
number of zeros mod 2; ``euler_cross_check`` compares the signed count with
an Euler characteristic.
"""

from __future__ import annotations

from dataclasses import dataclass


class MissingSigns(ValueError):
    """A signed count was requested but some determinant signs are unknown."""


class OddDimension(ValueError):
    """The mod-2 zero count is a statement about even-dimensional models."""


_SIGNS = ("+", "-", "unknown")


@dataclass(frozen=True)
class Zero:
    label: str
    det_sign: str = "unknown"

    def __post_init__(self):
        if self.det_sign not in _SIGNS:
            raise ValueError(f"det_sign must be one of {_SIGNS}")


@dataclass(frozen=True)
class ZeroCensus:
    source: str
    nonvanishing: bool
    zeros: tuple[Zero, ...]

    def __post_init__(self):
        if self.nonvanishing and self.zeros:
            raise ValueError("a nonvanishing field has no zeros to list")

    def count(self) -> int:
        return 0 if self.nonvanishing else len(self.zeros)


@dataclass(frozen=True)
class CountingVerdict:
    status: str              # "pass" | "fail" | "not_applicable"
    semi_characteristic: int
    zero_count: int
    parity_match: bool
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status != "fail"


def counting_check(k: int, census: ZeroCensus,
                   manifold_dim: int) -> CountingVerdict:
    """Compare a semi-characteristic with the zero count mod 2.

    In dimensions divisible by 4 the two must agree (pass/fail verdict).
    In dimensions 2 mod 4 the comparison is reported but carries no
    verdict (the counting statement fails there: the 2-torus has k = 1 with
    nonvanishing fields), status "not_applicable".  Odd dimensions raise
    OddDimension.
    """
    if manifold_dim % 2:
        raise OddDimension(f"manifold_dim {manifold_dim} is odd")
    if k not in (0, 1):
        raise ValueError("semi-characteristic must be reduced mod 2")
    count = census.count()
    match = (count % 2) == k
    if manifold_dim % 4 == 2:
        return CountingVerdict(
            "not_applicable", k, count, match,
            f"dimension {manifold_dim} = 2 mod 4: no counting statement "
            f"(k = {k}, zeros mod 2 = {count % 2})")
    status = "pass" if match else "fail"
    detail = "" if match else (
        f"k = {k} but the census lists {count} zeros ({count % 2} mod 2)")
    return CountingVerdict(status, k, count, match, detail)


@dataclass(frozen=True)
class EulerVerdict:
    passed: bool
    signed_sum: int
    expected: int

    @property
    def detail(self) -> str:
        if self.passed:
            return ""
        return (f"signed zero count {self.signed_sum} != "
                f"Euler characteristic {self.expected}")


def euler_cross_check(census: ZeroCensus, chi: int) -> EulerVerdict:
    """Signed zero count against an Euler characteristic.

    A nonvanishing field contributes 0 and must match chi = 0.  Otherwise
    every zero needs a known determinant sign (MissingSigns if not) and the
    sum of signs must equal chi.
    """
    if census.nonvanishing:
        return EulerVerdict(chi == 0, 0, chi)
    total = 0
    for z in census.zeros:
        if z.det_sign == "unknown":
            raise MissingSigns(f"zero {z.label!r} has unknown det sign")
        total += 1 if z.det_sign == "+" else -1
    return EulerVerdict(total == chi, total, chi)
