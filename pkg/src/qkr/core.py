"""State representation and split-operator evolution for the kicked rotor.

Units and conventions used throughout:

* Momentum lives on a discrete ladder p = (n + beta) in two-photon-recoil
  units (2*hbar*k_L), with integer order n in [-n_max, n_max - 1] and
  conserved quasimomentum beta in [-0.5, 0.5).  Reported momenta are
  converted to single-photon recoils (hbar*k_L), i.e. p_rec = 2*(n + beta),
  so the ladder spacing is 2 recoils.
* A kick multiplies the position-space wave by exp(+i*phi_d*cos(theta)).
  Populations do not depend on this sign choice; it only fixes internal
  phases, and the dense oracle uses the same convention.
* A free drift of scaled duration tau multiplies amplitude c_n by
  exp(-i*tau*(n + beta)^2 / 2).  tau equals the scaled kick period
  kbar = 8*omega_R*T, so tau = 4*pi is the quantum resonance and
  tau = 2*pi the anti-resonance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar
from scipy.special import jv

DEFAULT_N_MAX = 128

# Aliasing guard: population allowed in the outermost orders after a kick.
EDGE_GUARD_ORDERS = 2
EDGE_GUARD_TOL = 1e-8

# The dense propagator is an O(n^2) correctness oracle, not a workhorse.
DENSE_ORACLE_MAX_SIZE = 64

_I_POW = np.array([1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j])


class AliasingError(RuntimeError):
    """Population reached the edge of the momentum grid; enlarge n_max."""

    def __init__(self, message, event_index=None, member_index=None):
        super().__init__(message)
        self.event_index = event_index
        self.member_index = member_index


@dataclass
class QuantumState:
    """Complex amplitudes on the integer momentum ladder at fixed beta."""

    amplitudes: np.ndarray
    beta: float
    n_max: int

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.n_max <= 0:
            raise ValueError("n_max must be positive")
        if self.amplitudes.shape != (2 * self.n_max,):
            raise ValueError(
                f"amplitude array must have length 2*n_max={2 * self.n_max}, "
                f"got {self.amplitudes.shape}"
            )
        if not -0.5 <= self.beta < 0.5:
            raise ValueError(f"quasimomentum {self.beta} outside [-0.5, 0.5)")
        norm = self.norm_sq()
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"state not normalized: |psi|^2 = {norm}")

    def orders(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max)

    def momenta(self) -> np.ndarray:
        """Momentum of each ladder site in single-photon recoils."""
        return 2.0 * (self.orders() + self.beta)

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def copy(self) -> "QuantumState":
        return QuantumState(self.amplitudes.copy(), self.beta, self.n_max)


def plane_wave(n0: int, beta: float = 0.0, n_max: int = DEFAULT_N_MAX) -> QuantumState:
    """Momentum eigenstate with unit amplitude at ladder order n0."""
    if not -n_max <= n0 < n_max:
        raise ValueError(f"order {n0} outside grid [-{n_max}, {n_max - 1}]")
    amps = np.zeros(2 * n_max, dtype=np.complex128)
    amps[n0 + n_max] = 1.0
    return QuantumState(amps, beta, n_max)


def apply_kick(state: QuantumState, phi_d: float) -> QuantumState:
    """Apply one delta kick of strength phi_d via the spectral method.

    Transforms to the position representation on 2*n_max uniform theta
    samples, multiplies by exp(+i*phi_d*cos(theta)) and transforms back.
    Amplitudes move only between integer orders; beta is untouched.

    Raises AliasingError when more than EDGE_GUARD_TOL of the population
    ends up in the outermost EDGE_GUARD_ORDERS orders on either edge.
    """
    if not np.isfinite(phi_d):
        raise ValueError("kick strength must be finite")
    n = 2 * state.n_max
    theta = 2.0 * np.pi * np.arange(n) / n
    psi = np.fft.ifft(np.fft.ifftshift(state.amplitudes)) * n
    psi *= np.exp(1j * phi_d * np.cos(theta))
    amps = np.fft.fftshift(np.fft.fft(psi)) / n
    g = EDGE_GUARD_ORDERS
    edge = float(np.sum(np.abs(amps[:g]) ** 2) + np.sum(np.abs(amps[-g:]) ** 2))
    if edge > EDGE_GUARD_TOL:
        raise AliasingError(
            f"edge population {edge:.3e} exceeds {EDGE_GUARD_TOL:.0e} after kick "
            f"(phi_d={phi_d}); increase n_max beyond {state.n_max}"
        )
    return QuantumState(amps, state.beta, state.n_max)


def free_evolve(state: QuantumState, tau: float) -> QuantumState:
    """Free drift for scaled time tau: c_n *= exp(-i*tau*(n+beta)^2/2)."""
    if not np.isfinite(tau) or tau < 0:
        raise ValueError(f"drift duration must be finite and >= 0, got {tau}")
    m = state.orders() + state.beta
    amps = state.amplitudes * np.exp(-0.5j * tau * m * m)
    return QuantumState(amps, state.beta, state.n_max)


def dense_step_oracle(state: QuantumState, phi_d: float, tau: float) -> QuantumState:
    """One kick + drift step through an explicit Bessel matrix.

    The kick is the matrix K[m, n] = i^(m-n) * J_(m-n)(phi_d) from the
    Jacobi-Anger expansion of exp(+i*phi_d*cos(theta)), followed by the
    diagonal drift phases.  Serves as an independent cross-check of the
    spectral path; refuses grids beyond DENSE_ORACLE_MAX_SIZE.
    """
    if state.n_max > DENSE_ORACLE_MAX_SIZE:
        raise ValueError(
            f"dense oracle restricted to n_max <= {DENSE_ORACLE_MAX_SIZE}, "
            f"got {state.n_max}"
        )
    K = kick_matrix(state.n_max, phi_d)
    amps = K @ state.amplitudes
    m = state.orders() + state.beta
    amps *= np.exp(-0.5j * tau * m * m)
    return QuantumState(amps, state.beta, state.n_max)


def kick_matrix(n_max: int, phi_d: float) -> np.ndarray:
    """Dense one-kick unitary on the truncated ladder (oracle building block)."""
    orders = np.arange(-n_max, n_max)
    diff = orders[:, None] - orders[None, :]
    return _I_POW[np.mod(diff, 4)] * jv(diff, phi_d)


def fidelity(a: QuantumState, b: QuantumState) -> float:
    """Squared overlap |<a|b>|^2 of two states on the same ladder."""
    if a.n_max != b.n_max:
        raise ValueError(f"grid mismatch: n_max {a.n_max} vs {b.n_max}")
    if a.beta != b.beta:
        raise ValueError(f"quasimomentum mismatch: {a.beta} vs {b.beta}")
    return float(np.abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def kinetic_energy(state: QuantumState) -> float:
    """Scaled kinetic energy sum_n |c_n|^2 (n+beta)^2 / 2.

    The ladder unit is the two-photon recoil, i.e. one step of n is
    2 single-photon recoils of momentum.
    """
    m = state.orders() + state.beta
    return float(0.5 * np.sum(state.populations() * m * m))


# --- physical parameter helpers ---------------------------------------------
# Pure unit conversions; the simulator itself only consumes the dimensionless
# quantities (phi_d, kbar, epsilon, beta).


def recoil_frequency(wavelength: float, atom_mass: float) -> float:
    """Recoil frequency hbar*k_L^2/(2m) in rad/s for a laser wavelength in m."""
    if wavelength <= 0 or atom_mass <= 0:
        raise ValueError("wavelength and mass must be positive")
    k_l = 2.0 * np.pi / wavelength
    return hbar * k_l**2 / (2.0 * atom_mass)


def scaled_period(kick_period: float, omega_r: float) -> float:
    """Dimensionless kick period kbar = 8 * omega_R * T."""
    if kick_period < 0:
        raise ValueError("kick period must be >= 0")
    return 8.0 * omega_r * kick_period


def rabi_frequency(dipole_moment: float, field_amplitude: float) -> float:
    """On-resonance Rabi frequency d*E/(2*hbar) in rad/s."""
    return dipole_moment * field_amplitude / (2.0 * hbar)


def kick_strength(pulse_duration: float, rabi: float, detuning: float) -> float:
    """Dimensionless kick strength phi_d = tau_p * Omega^2 / (4*Delta)."""
    if detuning == 0:
        raise ValueError("resonant light (detuning = 0) is not modeled")
    return pulse_duration * rabi**2 / (4.0 * detuning)


@dataclass
class PhysicalParams:
    """Bundle of laboratory parameters; fields may be left unset (None).

    Cross-field consistency is enforced where enough fields are present:
    recoil_frequency must equal hbar*k^2/(2m) and detuning must equal
    laser_frequency - resonance_frequency, both to 1e-12 relative.
    """

    wavelength: float | None = None          # m
    atom_mass: float | None = None           # kg
    recoil_freq: float | None = None         # rad/s
    wave_number: float | None = None         # rad/m
    pulse_duration: float | None = None      # s
    rabi: float | None = None                # rad/s
    detuning: float | None = None            # rad/s
    laser_frequency: float | None = None     # rad/s
    resonance_frequency: float | None = None # rad/s
    dipole_moment: float | None = None       # C*m
    field_amplitude: float | None = None     # V/m
    kick_period: float | None = None         # s

    def __post_init__(self):
        if self.wavelength is not None and self.wave_number is None:
            self.wave_number = 2.0 * np.pi / self.wavelength
        if (
            self.recoil_freq is None
            and self.wave_number is not None
            and self.atom_mass is not None
        ):
            self.recoil_freq = hbar * self.wave_number**2 / (2.0 * self.atom_mass)
        if (
            self.recoil_freq is not None
            and self.wave_number is not None
            and self.atom_mass is not None
        ):
            expect = hbar * self.wave_number**2 / (2.0 * self.atom_mass)
            if abs(self.recoil_freq - expect) > 1e-12 * abs(expect):
                raise ValueError(
                    f"inconsistent recoil frequency: {self.recoil_freq} vs "
                    f"hbar*k^2/2m = {expect}"
                )
        if (
            self.detuning is None
            and self.laser_frequency is not None
            and self.resonance_frequency is not None
        ):
            self.detuning = self.laser_frequency - self.resonance_frequency
        if (
            self.detuning is not None
            and self.laser_frequency is not None
            and self.resonance_frequency is not None
        ):
            expect = self.laser_frequency - self.resonance_frequency
            if abs(self.detuning - expect) > 1e-12 * max(abs(expect), 1.0):
                raise ValueError(
                    f"inconsistent detuning: {self.detuning} vs "
                    f"omega_L - omega_0 = {expect}"
                )

    def scaled_kick_period(self) -> float:
        if self.kick_period is None or self.recoil_freq is None:
            raise ValueError("kick_period and recoil frequency must be set")
        return scaled_period(self.kick_period, self.recoil_freq)

    def phi_d(self) -> float:
        if self.rabi is None and None not in (self.dipole_moment, self.field_amplitude):
            self.rabi = rabi_frequency(self.dipole_moment, self.field_amplitude)
        if None in (self.pulse_duration, self.rabi, self.detuning):
            raise ValueError("pulse_duration, rabi and detuning must be set")
        return kick_strength(self.pulse_duration, self.rabi, self.detuning)
