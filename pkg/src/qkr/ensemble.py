"""Quasimomentum ensembles, combined momentum distributions and observables.

A condensate with momentum spread sigma_p (single-photon recoils) is modeled
as an incoherent weighted ensemble of plane waves plane_wave(0, beta_j), one
per quasimomentum sample.  Members evolve independently and their final
populations are deposited at p = 2*(n + beta_j) recoils.  Because the beta
samples are uniformly spaced, all deposit points together form a uniform
momentum grid of spacing 2/M, which is what the analysis operates on.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import DEFAULT_N_MAX, AliasingError, plane_wave
from .sequences import PulseTrain, run

# Paper-matched width of the imaged initial distribution, single-photon recoils.
INITIAL_WIDTH_TARGET = 0.43

# FWHM of a Gaussian is 2*sqrt(2*ln 2) sigma.
GAUSSIAN_FWHM_FACTOR = 2.0 * math.sqrt(2.0 * math.log(2.0))


class AnalysisError(RuntimeError):
    """Distribution is degenerate for the requested observable."""


class ResolutionWarning(UserWarning):
    """Convolution kernel narrower than the grid can resolve."""


@dataclass
class InitialEnsemble:
    """Weighted quasimomentum samples modeling the initial momentum width."""

    sigma_p: float
    betas: np.ndarray
    weights: np.ndarray

    @property
    def members(self) -> int:
        return len(self.betas)

    @classmethod
    def gaussian(cls, sigma_p: float, members: int) -> "InitialEnsemble":
        """Uniform beta grid of odd size with Gaussian weights.

        beta_j = -1/2 + (j + 1/2)/M puts one member exactly at beta = 0 for
        odd M.  Weights follow exp(-(2*beta)^2 / (2*sigma_p^2)); the factor 2
        converts beta (two-photon recoils) to single-photon recoils.
        """
        if members < 1 or members % 2 == 0:
            raise ValueError(f"member count must be odd and >= 1, got {members}")
        if sigma_p < 0:
            raise ValueError("sigma_p must be >= 0")
        j = np.arange(members)
        betas = -0.5 + (j + 0.5) / members
        if sigma_p == 0.0:
            weights = (betas == 0.0).astype(float)
        else:
            weights = np.exp(-((2.0 * betas) ** 2) / (2.0 * sigma_p**2))
        return cls(sigma_p=sigma_p, betas=betas, weights=weights / weights.sum())


@dataclass
class MomentumDistribution:
    """Density on a uniform momentum grid in single-photon recoils.

    mode "raw" distributions integrate to one; "W_p" distributions are
    normalized to the initial zero-momentum density instead.
    """

    grid: np.ndarray
    density: np.ndarray
    mode: str = "raw"

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.density = np.asarray(self.density, dtype=float)
        if self.grid.shape != self.density.shape:
            raise ValueError("grid and density must have the same shape")
        if self.mode not in ("raw", "W_p"):
            raise ValueError(f"unknown normalization mode {self.mode!r}")
        if np.any(self.density < 0):
            raise ValueError("density must be non-negative")
        if self.mode == "raw":
            mass = self.integral()
            if abs(mass - 1.0) > 1e-9:
                raise ValueError(f"raw density must integrate to 1, got {mass}")

    @property
    def spacing(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def integral(self) -> float:
        return float(np.sum(self.density) * self.spacing)

    def center_index(self) -> int:
        idx = int(np.argmin(np.abs(self.grid)))
        if abs(self.grid[idx]) > 0.5 * self.spacing:
            raise AnalysisError("grid does not contain p = 0")
        return idx


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        raw = os.environ.get("QKR_THREADS", "1")
        try:
            workers = int(raw)
        except ValueError as err:
            raise ValueError(f"QKR_THREADS must be an integer, got {raw!r}") from err
    if workers < 1:
        raise ValueError("worker count must be >= 1")
    return workers


def ensemble_distribution(
    train: PulseTrain,
    ensemble: InitialEnsemble,
    n_max: int = DEFAULT_N_MAX,
    record: bool = False,
    workers: int | None = None,
):
    """Evolve every ensemble member through the train and combine.

    Member j contributes weight * |c_n|^2 at p = 2*(n + beta_j); the union of
    deposit points over all members is a uniform grid of spacing 2/M covering
    the full ladder.  Members may be evolved concurrently (worker count from
    the QKR_THREADS environment variable unless given); the final sum always
    runs in member order, so results are identical for any worker count.

    Returns the combined distribution, plus the list of per-kick combined
    distributions when record is set.
    """
    m_count = ensemble.members

    def evolve(j: int):
        try:
            state = plane_wave(0, float(ensemble.betas[j]), n_max)
            traj = run(state, train, record=record)
        except AliasingError as err:
            raise AliasingError(
                f"ensemble member {j} (beta={ensemble.betas[j]}): {err}",
                event_index=err.event_index,
                member_index=j,
            ) from err
        return traj.final.populations(), traj.populations

    n_workers = _resolve_workers(workers)
    if n_workers == 1:
        results = [evolve(j) for j in range(m_count)]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(evolve, range(m_count)))

    def combine(pop_for_member) -> MomentumDistribution:
        dens = np.zeros(2 * n_max * m_count)
        for j in range(m_count):
            dens[j::m_count] += ensemble.weights[j] * pop_for_member(j)
        # density = mass / grid spacing (spacing is 2/M)
        return MomentumDistribution(_ladder_grid(n_max, m_count), dens * (m_count / 2.0))

    final = combine(lambda j: results[j][0])
    if not record:
        return final
    n_snapshots = len(results[0][1])
    per_kick = [combine(lambda j, k=k: results[j][1][k]) for k in range(n_snapshots)]
    return final, per_kick


def _ladder_grid(n_max: int, members: int) -> np.ndarray:
    # Index i0 carries p = 0 exactly (the beta = 0 member's order 0).
    size = 2 * n_max * members
    i0 = n_max * members + (members - 1) // 2
    return (np.arange(size) - i0) * (2.0 / members)


def normalize_W(dist: MomentumDistribution, initial: MomentumDistribution) -> MomentumDistribution:
    """Rescale density by the initial distribution's value at p = 0."""
    if not np.array_equal(dist.grid, initial.grid):
        raise ValueError("distributions live on different grids")
    ref = initial.density[initial.center_index()]
    if ref <= 0:
        raise ZeroDivisionError("initial distribution has zero density at p = 0")
    return MomentumDistribution(dist.grid, dist.density / ref, mode="W_p")


def convolve_resolution(dist: MomentumDistribution, sigma_res: float) -> MomentumDistribution:
    """Convolve with a normalized Gaussian kernel of width sigma_res.

    The kernel is sampled on the distribution grid and truncated at
    +-5*sigma_res; sigma_res = 0 returns an identical copy.
    """
    if sigma_res < 0:
        raise ValueError("sigma_res must be >= 0")
    if sigma_res == 0.0:
        return MomentumDistribution(dist.grid, dist.density.copy(), dist.mode)
    dp = dist.spacing
    if sigma_res < 0.5 * dp:
        warnings.warn(
            f"resolution kernel sigma={sigma_res} below half the grid spacing {dp}",
            ResolutionWarning,
            stacklevel=2,
        )
    half = int(np.ceil(5.0 * sigma_res / dp))
    x = np.arange(-half, half + 1) * dp
    kernel = np.exp(-(x**2) / (2.0 * sigma_res**2))
    kernel /= kernel.sum()
    return MomentumDistribution(dist.grid, np.convolve(dist.density, kernel, mode="same"), dist.mode)


def calibrated_resolution(
    sigma_p: float, target: float = INITIAL_WIDTH_TARGET
) -> float:
    """Gaussian resolution width that blows the initial ensemble up to target.

    Widths add in quadrature, so sigma_res = sqrt(target^2 - sigma_p^2).
    """
    if sigma_p >= target:
        raise ValueError(
            f"initial spread {sigma_p} already exceeds the target width {target}"
        )
    return math.sqrt(target**2 - sigma_p**2)


def fwhm_central_peak(dist: MomentumDistribution) -> float:
    """Full width at half maximum of the central lobe, in recoils.

    Walks outward from the global maximum to the first crossing below half
    maximum on each side and linearly interpolates both crossings.  Side
    lobes below half maximum are deliberately ignored; lobes that merge into
    the central lobe widen the result.  The search is limited to 1 recoil on
    either side of the peak.
    """
    dens = dist.density
    grid = dist.grid
    i_max = int(np.argmax(dens))
    p_max = grid[i_max]
    if abs(p_max) >= 1.0:
        raise AnalysisError(f"global maximum at p={p_max:.3f} is not a central peak")
    half = dens[i_max] / 2.0
    crossings = []
    for step in (1, -1):
        i = i_max
        found = None
        while 0 <= i + step < len(dens) and abs(grid[i + step] - p_max) <= 1.0:
            i += step
            if dens[i] < half:
                frac = (dens[i - step] - half) / (dens[i - step] - dens[i])
                found = grid[i - step] + frac * (grid[i] - grid[i - step])
                break
        if found is None:
            raise AnalysisError(
                "no half-maximum crossing within 1 recoil of the peak"
            )
        crossings.append(found)
    return float(crossings[0] - crossings[1])


def order_heights(dist: MomentumDistribution, metric: str = "height") -> tuple[np.ndarray, np.ndarray]:
    """Per-diffraction-order heights, orders at p = 2n recoils.

    metric "height" takes the maximum density inside the half-open window
    [2n - 0.5, 2n + 0.5); "integrated" sums density * dp over the window.
    Returns (orders, heights) for every order whose window intersects the grid.
    """
    if metric not in ("height", "integrated"):
        raise ValueError(f"unknown order metric {metric!r}")
    grid, dens = dist.grid, dist.density
    n_lo = math.ceil((grid[0] - 0.5) / 2.0)
    n_hi = math.floor((grid[-1] + 0.5) / 2.0)
    orders, heights = [], []
    for n in range(n_lo, n_hi + 1):
        lo = np.searchsorted(grid, 2.0 * n - 0.5, side="left")
        hi = np.searchsorted(grid, 2.0 * n + 0.5, side="left")
        if lo >= hi:
            continue
        window = dens[lo:hi]
        orders.append(n)
        if metric == "height":
            heights.append(float(window.max()))
        else:
            heights.append(float(window.sum() * dist.spacing))
    return np.array(orders), np.array(heights)


def p0_fraction(dist: MomentumDistribution, metric: str = "height") -> float:
    """Zero-momentum order height relative to the sum over all orders."""
    orders, heights = order_heights(dist, metric)
    total = heights.sum()
    if total <= 0:
        raise AnalysisError("all diffraction orders are empty")
    zero = np.nonzero(orders == 0)[0]
    h0 = heights[zero[0]] if len(zero) else 0.0
    return float(h0 / total)


@dataclass
class AnalysisResult:
    """Observables extracted from one momentum distribution."""

    fwhm: float
    p0_fraction: float
    orders: np.ndarray
    order_heights: np.ndarray
    per_kick: list[tuple[int, float]] = field(default_factory=list)


def analyze_distribution(
    dist: MomentumDistribution,
    metric: str = "height",
    per_kick: list[MomentumDistribution] | None = None,
) -> AnalysisResult:
    orders, heights = order_heights(dist, metric)
    result = AnalysisResult(
        fwhm=fwhm_central_peak(dist),
        p0_fraction=p0_fraction(dist, metric),
        orders=orders,
        order_heights=heights,
    )
    if per_kick is not None:
        result.per_kick = [
            (k + 1, p0_fraction(d, metric)) for k, d in enumerate(per_kick)
        ]
    return result
