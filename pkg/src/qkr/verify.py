"""Built-in correctness checks exposed through the CLI verify subcommand."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import jv

from . import core


@dataclass
class CheckResult:
    name: str
    expected: str
    actual: float
    tolerance: float
    passed: bool


def check_anti_resonance() -> CheckResult:
    """Two kicks separated by a 2*pi drift must undo each other at beta = 0."""
    worst = 1.0
    for phi in (0.5, 1.0, 2.0, 3.0):
        initial = core.plane_wave(0, 0.0, 128)
        state = core.apply_kick(initial, phi)
        state = core.free_evolve(state, 2.0 * np.pi)
        state = core.apply_kick(state, phi)
        worst = min(worst, core.fidelity(initial, state))
    deficit = 1.0 - worst
    return CheckResult(
        "anti-resonance pair", "1 - fidelity <= 1e-10", deficit, 1e-10, deficit <= 1e-10
    )


def check_resonance_growth() -> CheckResult:
    """At kbar = 4*pi the energy after N kicks of phi is (N*phi)^2/4."""
    phi = 1.0
    state = core.plane_wave(0, 0.0, 128)
    worst = 0.0
    for n in range(1, 11):
        state = core.apply_kick(state, phi)
        energy = core.kinetic_energy(state)
        expected = (n * phi) ** 2 / 4.0
        worst = max(worst, abs(energy - expected) / expected)
        state = core.free_evolve(state, 4.0 * np.pi)
    return CheckResult(
        "resonance energy growth", "max rel err <= 1e-6", worst, 1e-6, worst <= 1e-6
    )


def check_single_kick_bessel() -> CheckResult:
    """One kick of strength phi populates order n as J_n(phi)^2."""
    phi = 2.0
    state = core.apply_kick(core.plane_wave(0, 0.0, 128), phi)
    expected = jv(state.orders(), phi) ** 2
    worst = float(np.max(np.abs(state.populations() - expected)))
    return CheckResult(
        "single-kick diffraction", "max |pop - J_n^2| <= 1e-10", worst, 1e-10, worst <= 1e-10
    )


def check_dense_equivalence(trials: int = 100, seed: int = 20260809) -> CheckResult:
    """Spectral kick+drift agrees with the dense Bessel-matrix propagator.

    Trial states are confined to the central orders so that neither the
    cyclic wrap-around of the spectral path nor the truncation of the dense
    matrix is exercised; under that condition the two are the same operator.
    """
    rng = np.random.default_rng(seed)
    n_max = 32
    worst = 0.0
    for _ in range(trials):
        amps = np.zeros(2 * n_max, dtype=np.complex128)
        support = slice(n_max - 8, n_max + 9)
        amps[support] = rng.normal(size=17) + 1j * rng.normal(size=17)
        amps /= np.linalg.norm(amps)
        state = core.QuantumState(amps, 0.0, n_max)
        phi = rng.uniform(0.0, 5.0)
        tau = rng.uniform(0.0, 4.0 * np.pi)
        spectral = core.free_evolve(core.apply_kick(state, phi), tau)
        dense = core.dense_step_oracle(state, phi, tau)
        dev = float(np.max(np.abs(spectral.amplitudes - dense.amplitudes)))
        worst = max(worst, dev)
    return CheckResult(
        "spectral vs dense oracle", "max |dc| <= 1e-10", worst, 1e-10, worst <= 1e-10
    )


def run_checks() -> list[CheckResult]:
    return [
        check_anti_resonance(),
        check_resonance_growth(),
        check_single_kick_bessel(),
        check_dense_equivalence(),
    ]


def format_report(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(
            f"{status}  {r.name:<{width}}  actual={r.actual:.3e}  "
            f"tolerance={r.tolerance:.0e}  ({r.expected})"
        )
    return "\n".join(lines)
