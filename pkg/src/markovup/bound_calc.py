"""Certified evaluation of the series and constants behind the moment bounds.

Every series is returned as a partial sum plus a proven bound on the
discarded tail, so the true value is bracketed by [value, value + tail].
Tails are certified with elementary ratio majorants only: past the
truncation point the terms of sum(k**m * q**k) shrink at least as fast as
a geometric series with ratio q * ((K+1)/K)**m, which is summable in
closed form.  No special functions are involved, so every number here is
auditable by brute-force summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model_zoo import KappaSpec

__all__ = [
    "BoundSet",
    "DualBound",
    "InvalidQError",
    "SeriesValue",
    "TheoremBound",
    "fall_length_bound",
    "jump_moment",
    "make_bound_set",
    "overshoot_bound",
    "power_series",
    "q_bar",
    "theorem_bound",
]

DEFAULT_EPS = 1e-10


class InvalidQError(ValueError):
    """Series ratio outside (0, 1)."""


@dataclass(frozen=True, slots=True)
class SeriesValue:
    """Partial sum with a certified upper bound on the discarded tail."""

    value: float
    truncation_k: int
    tail_bound: float

    def __post_init__(self) -> None:
        if self.tail_bound < 0.0 or not math.isfinite(self.value):
            raise ValueError("series value must be finite with non-negative tail")

    @property
    def upper(self) -> float:
        """Certified upper bracket of the true sum."""
        return self.value + self.tail_bound

    def scaled(self, factor: float) -> "SeriesValue":
        """The series multiplied termwise by a non-negative constant."""
        if factor < 0.0:
            raise ValueError("factor must be non-negative")
        return SeriesValue(self.value * factor, self.truncation_k, self.tail_bound * factor)

    def to_dict(self) -> dict:
        return {"value": self.value, "truncation_k": self.truncation_k, "tail_bound": self.tail_bound}


def power_series(m: int, q: float, eps: float = DEFAULT_EPS) -> SeriesValue:
    """Certified evaluation of sum_{k>=1} k**m * q**k.

    Terms are accumulated until the ratio majorant
    rho_K = q * ((K+1)/K)**m drops below 1 and the geometric tail estimate
    term_K * rho_K / (1 - rho_K) falls under eps.
    """
    if not 0.0 < q < 1.0:
        raise InvalidQError(f"q must lie in (0, 1), got {q}")
    if m < 0:
        raise ValueError("m must be non-negative")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    total = 0.0
    k = 0
    while True:
        k += 1
        term = k**m * q**k
        total += term
        rho = q * ((k + 1) / k) ** m
        if rho < 1.0:
            tail = term * rho / (1.0 - rho)
            if tail < eps:
                return SeriesValue(total, k, tail)


def fall_length_bound(m: int, kappa: KappaSpec, eps: float = DEFAULT_EPS) -> SeriesValue:
    """Certified evaluation of sum_{i>=1} i**m * (1 - kappa_i).

    Bounds the m-th moment of a fall length on falls that stop above the
    floor.  For the geometric-gap family the summand is a * i**m * r**i,
    so this is the power series at ratio r scaled by a.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    return power_series(m, kappa.r, eps / kappa.a).scaled(kappa.a)


def jump_moment(s: float, m: int, eps: float = DEFAULT_EPS) -> float:
    """m-th moment of a geometric up-jump on {0, 1, 2, ...} with parameter s."""
    if not 0.0 < s < 1.0:
        raise InvalidQError(f"s must lie in (0, 1), got {s}")
    if m < 0:
        raise ValueError("m must be non-negative")
    if m == 0:
        return 1.0
    series = power_series(m, 1.0 - s, eps)
    return s * series.upper


@dataclass(frozen=True, slots=True)
class DualBound:
    """Two assemblies of the overshoot constant; the larger one is binding.

    ``per_step_form``  M * sum_{i>=1} i**m * q**(i-1)
    ``compact_form``   M * q * sum_{i>=1} i**m * q**i
    where M is the single-jump moment.  The two differ by index
    bookkeeping; keeping the max stays sound under either reading and
    both are reported.
    """

    per_step_form: SeriesValue
    compact_form: SeriesValue

    @property
    def chosen(self) -> SeriesValue:
        if self.per_step_form.upper >= self.compact_form.upper:
            return self.per_step_form
        return self.compact_form

    @property
    def upper(self) -> float:
        return self.chosen.upper

    @property
    def value(self) -> float:
        return self.chosen.value

    def to_dict(self) -> dict:
        return {
            "per_step_form": self.per_step_form.to_dict(),
            "compact_form": self.compact_form.to_dict(),
            "chosen": self.chosen.value,
        }


def overshoot_bound(m: int, q: float, m_jump: float, eps: float = DEFAULT_EPS) -> DualBound:
    """Certified bound on the m-th moment of a rise overshoot.

    ``m_jump`` is the m-th moment of the positive part of a single jump.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if m_jump < 0.0:
        raise ValueError("m_jump must be non-negative")
    base = power_series(m, q, eps)
    if m_jump == 0.0:
        zero = SeriesValue(0.0, base.truncation_k, 0.0)
        return DualBound(zero, zero)
    per_step = base.scaled(m_jump / q)
    compact = base.scaled(m_jump * q)
    return DualBound(per_step_form=per_step, compact_form=compact)


def q_bar(kappa: KappaSpec, eps: float = DEFAULT_EPS) -> SeriesValue:
    """Certified evaluation of 1 - prod_{i>=0} kappa_i.

    This is the failure-probability bound for a single descent attempt.
    The product is truncated at K and the dropped log-tail is dominated by
    sum_{i>K} (1 - kappa_i) / kappa_K <= a * r**(K+1) / ((1 - r) * kappa_K),
    which converts back to a multiplicative bracket on the product.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    a, r = kappa.a, kappa.r
    prod = 1.0
    k = -1
    while True:
        k += 1
        prod *= kappa.at(k)
        log_tail = a * r ** (k + 1) / ((1.0 - r) * kappa.at(k))
        # prod_inf lies in [prod * exp(-log_tail), prod]
        tail = prod * (1.0 - math.exp(-log_tail))
        if tail < eps:
            return SeriesValue(1.0 - prod, k, tail)


@dataclass(frozen=True, slots=True)
class BoundSet:
    """All certified constants needed by the hitting-time bound at order m."""

    m: int
    q: float
    q_bar: float
    q_bar_series: SeriesValue
    rise_bound: SeriesValue       # sum k**m q**k
    fall_bound: SeriesValue       # sum i**m (1 - kappa_i)
    overshoot: DualBound
    jump_m: float                 # m-th moment of one up-jump
    attempt_series: SeriesValue   # sum_{i>=1} i**m q_bar**(i-1)

    @property
    def c1(self) -> float:
        return 2.0 ** (2 * self.m - 2)

    @property
    def c2(self) -> float:
        return (
            self.rise_bound.upper + self.fall_bound.upper + self.overshoot.upper * self.q_bar
        ) * self.attempt_series.upper

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "q": self.q,
            "q_bar": self.q_bar,
            "q_bar_series": self.q_bar_series.to_dict(),
            "rise_bound": self.rise_bound.to_dict(),
            "fall_bound": self.fall_bound.to_dict(),
            "overshoot": self.overshoot.to_dict(),
            "jump_m": self.jump_m,
            "attempt_series": self.attempt_series.to_dict(),
            "c1": self.c1,
            "c2": self.c2,
        }


def make_bound_set(
    m: int, kappa: KappaSpec, up_jump_s: float, eps: float = DEFAULT_EPS
) -> BoundSet:
    """Assemble every constant for moment order m from the model parameters."""
    if m < 1:
        raise ValueError("m must be >= 1")
    q = kappa.q
    qb_series = q_bar(kappa, eps)
    qb = qb_series.upper
    rise = power_series(m, q, eps)
    fall = fall_length_bound(m, kappa, eps)
    jm = jump_moment(up_jump_s, m, eps)
    over = overshoot_bound(m, q, jm, eps)
    attempt = power_series(m, qb, eps).scaled(1.0 / qb)
    return BoundSet(
        m=m,
        q=q,
        q_bar=qb,
        q_bar_series=qb_series,
        rise_bound=rise,
        fall_bound=fall,
        overshoot=over,
        jump_m=jm,
        attempt_series=attempt,
    )


@dataclass(frozen=True, slots=True)
class TheoremBound:
    """Hitting-time moment bound at one start state, both assemblies reported.

    ``display``  2**(2m-2) * (x**m + (R + F + V*q_bar) * S)
    ``termwise`` the same sum re-derived term by term, which carries the
                 overshoot constant V without the extra q_bar factor and
                 is therefore larger.
    ``value``    the max of the two, the certified bound.
    """

    display: float
    termwise: float
    c1: float
    c2: float

    @property
    def value(self) -> float:
        return max(self.display, self.termwise)

    def to_dict(self) -> dict:
        return {
            "display": self.display,
            "termwise": self.termwise,
            "value": self.value,
            "c1": self.c1,
            "c2": self.c2,
        }


def theorem_bound(m: int, x: int, bounds: BoundSet) -> TheoremBound:
    """Evaluate the polynomial moment bound E_x tau**m <= C1 * (C2 + x**m)."""
    if m != bounds.m:
        raise ValueError(f"bound set was built for m={bounds.m}, got m={m}")
    if x < 0:
        raise ValueError("x must be non-negative")
    c1 = bounds.c1
    s = bounds.attempt_series.upper
    core = bounds.rise_bound.upper + bounds.fall_bound.upper
    display = c1 * (x**m + (core + bounds.overshoot.upper * bounds.q_bar) * s)
    # Term-by-term assembly: the fall-bound sum re-indexes to the same S
    # and the overshoot sum carries q_bar**(i-1) directly, so no q_bar
    # factor on the overshoot constant.
    termwise = c1 * (x**m + (core + bounds.overshoot.upper) * s)
    return TheoremBound(display=display, termwise=termwise, c1=c1, c2=bounds.c2)
