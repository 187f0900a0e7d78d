"""Offline stopping times and fall/rise attempt decomposition of paths.

Works on realized (finite) state sequences.  The forward-looking run ends
are only defined once the run is observed to break; asking for one on a
path that ends mid-run raises instead of silently clamping, so downstream
statistics are never biased by truncation.  The one exception is the
attempt decomposition: a fall that reaches the floor set is complete by
definition, even though the path stops there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .process_core import StopReason, Trajectory

__all__ = [
    "Attempt",
    "AttemptDecomposition",
    "NotHitError",
    "UnterminatedRunError",
    "chi_at",
    "decompose_attempts",
    "tau_of",
    "xi_at",
    "zeta_at",
]


class UnterminatedRunError(ValueError):
    """The sequence ended while the queried run was still in progress."""


class NotHitError(ValueError):
    """Decomposition requested for a path that never reached the floor."""


def _check_index(states: Sequence[int], n: int) -> None:
    if not 0 <= n < len(states):
        raise IndexError(f"index {n} out of range for sequence of length {len(states)}")


def zeta_at(states: Sequence[int], n: int) -> int:
    """Start index of the strict down-run ending at n.

    Smallest k <= n with every step on [k, n-1] strictly down; equals n
    itself when the step into n was non-decreasing or n is 0.
    """
    _check_index(states, n)
    k = n
    while k > 0 and states[k] < states[k - 1]:
        k -= 1
    return k


def xi_at(states: Sequence[int], n: int) -> int:
    """End index of the non-decreasing run starting at n.

    Largest k >= n with every step on [n, k-1] non-decreasing; equals n
    when the first step is strictly down.  Raises if the sequence ends
    before a strict down-step is seen, because the true run end is then
    unknowable.
    """
    _check_index(states, n)
    k = n
    last = len(states) - 1
    while True:
        if k == last:
            raise UnterminatedRunError(
                f"rise starting at {n} is still open at the end of the sequence"
            )
        if states[k + 1] < states[k]:
            return k
        k += 1


def chi_at(states: Sequence[int], n: int) -> int:
    """End index of the strict down-run starting at n (mirror of xi_at)."""
    _check_index(states, n)
    k = n
    last = len(states) - 1
    while True:
        if k == last:
            raise UnterminatedRunError(
                f"fall starting at {n} is still open at the end of the sequence"
            )
        if states[k + 1] >= states[k]:
            return k
        k += 1


def tau_of(states: Sequence[int], floor_n: int) -> Optional[int]:
    """First index at or below the floor level, or None if never."""
    for t, x in enumerate(states):
        if x <= floor_n:
            return t
    return None


@dataclass(frozen=True, slots=True)
class Attempt:
    """One maximal fall [start, end]; successful iff it reached the floor."""

    index: int
    start: int
    end: int
    success: bool

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True, slots=True)
class AttemptDecomposition:
    """Alternating fall/rise tiling of [0, tau].

    ``times`` is the flat sequence (T_0, t_0, T_1, t_1, ..., T_i): falls
    run over [t_{j-1}, T_j], rises over [T_j, t_j].  In case "I" the path
    starts falling and the initial rise [T_0, t_0] is empty; in case "II"
    it starts rising.  The final fall is the single successful attempt.
    A path with tau = 0 decomposes trivially (no attempts).
    """

    case: str
    times: tuple[int, ...]
    attempts: tuple[Attempt, ...]
    successful_attempt: Optional[int]

    @property
    def rise_segments(self) -> tuple[tuple[int, int, int], ...]:
        """(j, T_j, t_j) for every rise in the decomposition, j from 0."""
        out = []
        for j in range(len(self.attempts)):
            out.append((j, self.times[2 * j], self.times[2 * j + 1]))
        return tuple(out)

    @property
    def fall_segments(self) -> tuple[tuple[int, int, int], ...]:
        """(j, t_{j-1}, T_j) for every attempt, j from 1."""
        out = []
        for j in range(1, len(self.attempts) + 1):
            out.append((j, self.times[2 * j - 1], self.times[2 * j]))
        return tuple(out)


def decompose_attempts(traj: Trajectory) -> AttemptDecomposition:
    """Split a floor-hitting path into descent attempts and rises.

    Each attempt is a maximal strict fall; exactly the last one reaches
    [0, N].  The intervals tile [0, tau] and each fall is no longer than
    its start height (down-steps have size at least one).
    """
    if traj.stop_reason is not StopReason.HIT_FLOOR or traj.tau is None:
        raise NotHitError("decomposition requires a trajectory that hit the floor")
    states = traj.states
    tau = traj.tau
    if tau == 0:
        return AttemptDecomposition(case="I", times=(0,), attempts=(), successful_attempt=None)

    case = "I" if states[1] < states[0] else "II"
    times: list[int] = [0]  # T_0
    t_prev = 0 if case == "I" else xi_at(states, 0)
    times.append(t_prev)  # t_0

    attempts: list[Attempt] = []
    last = len(states) - 1
    while True:
        j = len(attempts) + 1
        # fall from t_prev: the first step is strictly down by construction
        k = t_prev
        while k < last and states[k + 1] < states[k]:
            k += 1
        success = states[k] <= traj.floor_n
        attempts.append(Attempt(index=j, start=t_prev, end=k, success=success))
        times.append(k)  # T_j
        if success:
            return AttemptDecomposition(
                case=case,
                times=tuple(times),
                attempts=tuple(attempts),
                successful_attempt=j,
            )
        t_prev = xi_at(states, k)
        times.append(t_prev)  # t_j
