"""Memory-window state, transition-kernel contract, and path simulation.

A Markov-up process is Markov while it rises but, while it falls, may
condition on the whole current strictly-decreasing run.  That run (the
"fall window") is therefore the entire state a kernel is allowed to see:
two calls with equal windows must return identical step distributions.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

__all__ = [
    "DistributionInvalidError",
    "FallWindow",
    "KernelContract",
    "StepDistribution",
    "StopReason",
    "Trajectory",
    "initial_window",
    "sample_step",
    "simulate_path",
    "window_update",
]

MASS_TOL = 1e-12


class DistributionInvalidError(ValueError):
    """A step distribution whose total mass is not 1 within tolerance."""


class StopReason(Enum):
    HIT_FLOOR = "hit_floor"
    STEP_CAP = "step_cap"


@dataclass(frozen=True, slots=True)
class FallWindow:
    """The strictly decreasing trajectory suffix the process remembers.

    ``start_time`` is the index at which the current down-run began;
    ``values`` holds the states from there to the present.  A window of
    length one means the last step was non-decreasing (or time is 0).
    """

    start_time: int
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.start_time < 0:
            raise ValueError("start_time must be non-negative")
        if len(self.values) < 1:
            raise ValueError("window must contain at least one state")
        for a, b in zip(self.values, self.values[1:]):
            if not b < a:
                raise ValueError(f"window values must strictly decrease, got {self.values}")
        if self.values[-1] < 0:
            raise ValueError("states must be non-negative")

    @property
    def current(self) -> int:
        """State at the present time."""
        return self.values[-1]

    @property
    def fall_length(self) -> int:
        """Number of consecutive down-steps leading into the present state."""
        return len(self.values) - 1


def initial_window(x0: int) -> FallWindow:
    """Window of a freshly started path: just the start state at time 0."""
    return FallWindow(0, (x0,))


def window_update(window: FallWindow, x_next: int, n_next: int) -> FallWindow:
    """Advance the fall window by one observed step.

    A strict decrease extends the run; anything else (including a flat
    step) resets the window to the single new state.
    """
    expected = window.start_time + len(window.values)
    if n_next != expected:
        raise ValueError(f"n_next must be {expected}, got {n_next}")
    if x_next < window.values[-1]:
        return FallWindow(window.start_time, window.values + (x_next,))
    return FallWindow(n_next, (x_next,))


@dataclass(frozen=True, slots=True)
class StepDistribution:
    """One-step law over non-negative integers.

    The finite head is given explicitly; an optional geometric tail
    carries the remaining mass exactly, so countable supports need no
    truncation:  P(tail_start + k) = tail_mass * (1 - tail_ratio) * tail_ratio**k.
    """

    states: tuple[int, ...]
    probs: tuple[float, ...]
    tail_start: Optional[int] = None
    tail_mass: float = 0.0
    tail_ratio: float = 0.0

    def __post_init__(self) -> None:
        if len(self.states) != len(self.probs):
            raise ValueError("states and probs must have equal length")
        if any(b <= a for a, b in zip(self.states, self.states[1:])):
            raise ValueError("states must be strictly increasing")
        if self.tail_start is not None:
            if self.states and self.tail_start <= self.states[-1]:
                raise ValueError("tail must start above the finite head")
            if not 0.0 < self.tail_ratio < 1.0:
                raise ValueError("tail_ratio must be in (0, 1)")

    def total_mass(self) -> float:
        return sum(self.probs) + self.tail_mass

    def validate(self) -> None:
        """Raise unless the support is admissible and mass sums to 1."""
        if (self.states and self.states[0] < 0) or (
            self.tail_start is not None and self.tail_start < 0
        ):
            raise DistributionInvalidError("support must be non-negative")
        mass = self.total_mass()
        if abs(mass - 1.0) > MASS_TOL:
            raise DistributionInvalidError(f"total mass {mass!r} is not 1 within {MASS_TOL}")

    def quantile(self, u: float) -> int:
        """Inverse CDF with states enumerated in increasing order."""
        self.validate()
        acc = 0.0
        for state, p in zip(self.states, self.probs):
            acc += p
            if u < acc:
                return state
        if self.tail_start is None:
            # u landed in the rounding sliver above the last cumulative value
            return self.states[-1]
        v = (u - acc) / self.tail_mass
        if v < 0.0:
            v = 0.0
        elif v >= 1.0:
            v = math.nextafter(1.0, 0.0)
        k = int(math.log1p(-v) / math.log(self.tail_ratio))
        return self.tail_start + k

    def prob(self, state: int) -> float:
        """Point mass at ``state``."""
        for s, p in zip(self.states, self.probs):
            if s == state:
                return p
        if self.tail_start is not None and state >= self.tail_start:
            k = state - self.tail_start
            return self.tail_mass * (1.0 - self.tail_ratio) * self.tail_ratio**k
        return 0.0

    def items(self, coverage_eps: float = 1e-12) -> Iterator[tuple[int, float]]:
        """Yield (state, prob) pairs until at most ``coverage_eps`` mass remains."""
        for s, p in zip(self.states, self.probs):
            yield s, p
        if self.tail_start is None:
            return
        remaining = self.tail_mass
        k = 0
        while remaining > coverage_eps:
            p = self.tail_mass * (1.0 - self.tail_ratio) * self.tail_ratio**k
            yield self.tail_start + k, p
            remaining -= p
            k += 1


class KernelContract(ABC):
    """Transition law that sees nothing but the current fall window.

    Implementations must be pure: equal windows yield equal (structurally
    identical) distributions, supports stay in the non-negative integers,
    and no down-move is offered from state 0.
    """

    @property
    @abstractmethod
    def floor_n(self) -> int:
        """Level of the floor set [0, floor_n]."""

    @abstractmethod
    def next(self, window: FallWindow) -> StepDistribution:
        """Distribution of the next state given the fall window."""


def sample_step(kernel: KernelContract, window: FallWindow, rng) -> int:
    """Draw the next state by inverse CDF on the kernel's distribution.

    ``rng`` is any object with a ``random()`` method producing uniforms
    on [0, 1); for a fixed draw the result is deterministic.
    """
    return kernel.next(window).quantile(rng.random())


@dataclass(frozen=True, slots=True)
class Trajectory:
    """A realized path together with its floor level and stopping data."""

    x0: int
    states: tuple[int, ...]
    floor_n: int
    stop_reason: StopReason
    tau: Optional[int]

    def __post_init__(self) -> None:
        if not self.states or self.states[0] != self.x0:
            raise ValueError("states must start at x0")
        if self.stop_reason is StopReason.HIT_FLOOR and self.tau is None:
            raise ValueError("hit_floor trajectories must carry tau")
        if self.stop_reason is StopReason.STEP_CAP and self.tau is not None:
            raise ValueError("capped trajectories have no tau")


def simulate_path(
    kernel: KernelContract, x0: int, max_steps: int, rng
) -> Trajectory:
    """Run one path until it enters [0, N] or the step cap is hit.

    The same (kernel, x0, stream) always reproduces the same trajectory.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    if x0 < 0:
        raise ValueError("x0 must be non-negative")
    floor_n = kernel.floor_n
    if x0 <= floor_n:
        return Trajectory(x0, (x0,), floor_n, StopReason.HIT_FLOOR, 0)
    states = [x0]
    window = initial_window(x0)
    for t in range(1, max_steps + 1):
        x = sample_step(kernel, window, rng)
        states.append(x)
        if x <= floor_n:
            return Trajectory(x0, tuple(states), floor_n, StopReason.HIT_FLOOR, t)
        window = window_update(window, x, t)
    return Trajectory(x0, tuple(states), floor_n, StopReason.STEP_CAP, None)
