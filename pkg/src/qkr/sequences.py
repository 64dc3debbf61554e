"""Pulse trains: explicit kick/drift event lists and their execution."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import core
from .core import AliasingError, QuantumState


@dataclass(frozen=True)
class Kick:
    strength: float

    def __post_init__(self):
        if not math.isfinite(self.strength):
            raise ValueError("kick strength must be finite")


@dataclass(frozen=True)
class Drift:
    duration: float

    def __post_init__(self):
        if not math.isfinite(self.duration) or self.duration < 0:
            raise ValueError("drift duration must be finite and >= 0")


PulseEvent = Kick | Drift


@dataclass(frozen=True)
class PulseTrain:
    """Immutable ordered list of pulse events."""

    events: tuple[PulseEvent, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))

    @property
    def kick_count(self) -> int:
        return sum(1 for e in self.events if isinstance(e, Kick))

    @property
    def total_duration(self) -> float:
        return math.fsum(e.duration for e in self.events if isinstance(e, Drift))


def periodic_train(n_kicks: int, kbar: float, phi_d: float) -> PulseTrain:
    """Standard kicked-rotor train: n_kicks kicks separated by drifts of kbar."""
    if n_kicks < 1:
        raise ValueError(f"need at least one kick, got {n_kicks}")
    events: list[PulseEvent] = [Kick(phi_d)]
    for _ in range(n_kicks - 1):
        events.append(Drift(kbar))
        events.append(Kick(phi_d))
    return PulseTrain(tuple(events), label=f"periodic(N={n_kicks}, kbar={kbar}, phi={phi_d})")


def loschmidt_train(
    n_kicks: int,
    epsilon: float,
    phi_d: float,
    midpoint_mode: str = "replace",
) -> PulseTrain:
    """Time-reversal train: N/2 kicks at 4*pi+epsilon, a 6*pi wait, then
    N/2 kicks at 4*pi-epsilon.

    midpoint_mode selects how the 6*pi wait combines with the inter-kick
    period at the half-way point:

    * "replace" (default): the 6*pi wait takes the place of the inter-kick
      drift, so the single drift between kicks N/2 and N/2+1 is exactly 6*pi.
    * "append": the wait is added on top of a normal first-half period, one
      drift of (4*pi+epsilon)+6*pi.
    """
    if n_kicks < 2 or n_kicks % 2 != 0:
        raise ValueError(f"kick count must be even and >= 2, got {n_kicks}")
    if not math.isfinite(epsilon):
        raise ValueError("epsilon must be finite")
    if midpoint_mode not in ("replace", "append"):
        raise ValueError(f"unknown midpoint_mode {midpoint_mode!r}")
    half = n_kicks // 2
    forward = 4.0 * np.pi + epsilon
    backward = 4.0 * np.pi - epsilon
    wait = 6.0 * np.pi if midpoint_mode == "replace" else forward + 6.0 * np.pi
    events: list[PulseEvent] = [Kick(phi_d)]
    for _ in range(half - 1):
        events.append(Drift(forward))
        events.append(Kick(phi_d))
    events.append(Drift(wait))
    events.append(Kick(phi_d))
    for _ in range(half - 1):
        events.append(Drift(backward))
        events.append(Kick(phi_d))
    return PulseTrain(
        tuple(events),
        label=f"loschmidt(N={n_kicks}, eps={epsilon}, phi={phi_d}, midpoint={midpoint_mode})",
    )


@dataclass
class Trajectory:
    """Final state plus optional per-kick population snapshots."""

    final: QuantumState
    populations: list[np.ndarray] = field(default_factory=list)


def run(state: QuantumState, train: PulseTrain, record: bool = False) -> Trajectory:
    """Apply the train's events in order to a copy of the state.

    With record=True a population snapshot is captured immediately after
    each kick.  Populations are drift-invariant, so the snapshots are
    independent of where between kicks they are taken.
    """
    current = state.copy()
    snapshots: list[np.ndarray] = []
    for index, event in enumerate(train.events):
        try:
            if isinstance(event, Kick):
                current = core.apply_kick(current, event.strength)
                if record:
                    snapshots.append(current.populations())
            else:
                current = core.free_evolve(current, event.duration)
        except AliasingError as err:
            raise AliasingError(
                f"event {index} of train {train.label!r}: {err}", event_index=index
            ) from err
    return Trajectory(final=current, populations=snapshots)
