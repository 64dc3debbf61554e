import numpy as np
import pytest
from numpy.testing import assert_allclose

from qkr.core import AliasingError
from qkr.ensemble import (
    AnalysisError,
    InitialEnsemble,
    MomentumDistribution,
    ResolutionWarning,
    analyze_distribution,
    calibrated_resolution,
    convolve_resolution,
    ensemble_distribution,
    fwhm_central_peak,
    normalize_W,
    order_heights,
    p0_fraction,
)
from qkr.sequences import PulseTrain, loschmidt_train, periodic_train

from oracles import ECHO_P0_FINAL, bessel_quad, gaussian_fwhm

IDLE = PulseTrain((), label="idle")


def uniform_grid(spacing=0.01, half=4000):
    return (np.arange(2 * half + 1) - half) * spacing


def gaussian_dist(sigma, spacing=0.01, half=4000, center=0.0, mode="raw"):
    grid = uniform_grid(spacing, half)
    dens = np.exp(-((grid - center) ** 2) / (2 * sigma**2))
    dens /= dens.sum() * spacing
    return MomentumDistribution(grid, dens, mode)


# --- ensemble construction ---------------------------------------------------

def test_gaussian_ensemble_basics():
    ens = InitialEnsemble.gaussian(0.05, 201)
    assert ens.members == 201
    assert abs(ens.weights.sum() - 1.0) < 1e-12
    assert np.count_nonzero(ens.betas == 0.0) == 1
    assert np.all(ens.betas >= -0.5) and np.all(ens.betas < 0.5)
    # uniform spacing 1/M
    assert_allclose(np.diff(ens.betas), 1.0 / 201, rtol=1e-12)


def test_gaussian_ensemble_zero_width():
    ens = InitialEnsemble.gaussian(0.0, 11)
    assert ens.weights[ens.betas == 0.0] == 1.0
    assert ens.weights.sum() == 1.0


@pytest.mark.parametrize("members", [0, 2, 100, -3])
def test_gaussian_ensemble_rejects_even_counts(members):
    with pytest.raises(ValueError):
        InitialEnsemble.gaussian(0.05, members)


def test_gaussian_ensemble_rejects_negative_width():
    with pytest.raises(ValueError):
        InitialEnsemble.gaussian(-0.1, 11)


# --- combined distributions ----------------------------------------------------

def test_idle_train_reproduces_initial_comb():
    # identity evolution returns the weighted beta comb; measured width
    # matches the requested spread
    ens = InitialEnsemble.gaussian(0.215, 201)
    dist = ensemble_distribution(IDLE, ens, 32)
    assert abs(dist.integral() - 1.0) < 1e-12
    width = fwhm_central_peak(dist) / gaussian_fwhm(1.0)
    assert_allclose(width, 0.215, rtol=0.01)


def test_single_member_single_kick_bessel_heights():
    ens = InitialEnsemble.gaussian(0.0, 1)
    dist = ensemble_distribution(periodic_train(1, 0.0, 2.0), ens, 64)
    assert dist.spacing == 2.0
    masses = dist.density * dist.spacing
    for n in range(-5, 6):
        assert_allclose(masses[64 + n], bessel_quad(n, 2.0) ** 2, atol=1e-12)


def test_single_member_pipeline_matches_rotor_exactly():
    from qkr.core import plane_wave
    from qkr.sequences import run

    ens = InitialEnsemble.gaussian(0.0, 1)
    tr = loschmidt_train(4, 1.0, 2.0)
    dist = ensemble_distribution(tr, ens, 64)
    pops = run(plane_wave(0, 0.0, 64), tr).final.populations()
    assert np.array_equal(dist.density * dist.spacing, pops)


def test_loschmidt_distribution_shape():
    # narrow dominant return peak at p = 0 with pedestal structure at the
    # neighboring diffraction orders
    ens = InitialEnsemble.gaussian(0.05, 201)
    dist = ensemble_distribution(loschmidt_train(10, 1.0, 2.0), ens, 64)
    i_max = int(np.argmax(dist.density))
    assert abs(dist.grid[i_max]) < dist.spacing
    assert fwhm_central_peak(dist) < fwhm_central_peak(ensemble_distribution(IDLE, ens, 64))
    orders, heights = order_heights(dist)
    h = dict(zip(orders.tolist(), heights.tolist()))
    assert h[1] > 0.001 and h[-1] > 0.001


def test_ensemble_linearity():
    # deposits are linear in the weights: an equal mixture of two ensembles
    # gives the average of their distributions
    u = InitialEnsemble.gaussian(0.05, 41)
    v = InitialEnsemble.gaussian(0.215, 41)
    mix = InitialEnsemble(sigma_p=0.1, betas=u.betas, weights=0.5 * (u.weights + v.weights))
    tr = loschmidt_train(4, 1.0, 2.0)
    du = ensemble_distribution(tr, u, 32)
    dv = ensemble_distribution(tr, v, 32)
    dm = ensemble_distribution(tr, mix, 32)
    assert np.max(np.abs(dm.density - 0.5 * (du.density + dv.density))) < 1e-12


def test_ensemble_symmetry():
    ens = InitialEnsemble.gaussian(0.1, 41)
    dist = ensemble_distribution(loschmidt_train(6, 0.8, 2.0), ens, 64)
    i0 = dist.center_index()
    right = dist.density[i0 + 1 : 2 * i0 + 1]
    left = dist.density[i0 - 1 :: -1][: len(right)]
    assert np.max(np.abs(right - left)) < 1e-10


def test_ensemble_worker_invariance():
    ens = InitialEnsemble.gaussian(0.05, 21)
    tr = loschmidt_train(4, 1.0, 2.0)
    serial = ensemble_distribution(tr, ens, 32, workers=1)
    threaded = ensemble_distribution(tr, ens, 32, workers=8)
    assert np.array_equal(serial.density, threaded.density)


def test_ensemble_aliasing_tags_member():
    ens = InitialEnsemble.gaussian(0.05, 5)
    with pytest.raises(AliasingError, match="member 0"):
        ensemble_distribution(loschmidt_train(2, 0.0, 30.0), ens, 16)


def test_ensemble_recording():
    ens = InitialEnsemble.gaussian(0.05, 21)
    final, per_kick = ensemble_distribution(loschmidt_train(6, 1.0, 2.0), ens, 32, record=True)
    assert len(per_kick) == 6
    assert np.array_equal(per_kick[-1].density, final.density)
    for d in per_kick:
        assert abs(d.integral() - 1.0) < 1e-9


# --- W_p normalization ---------------------------------------------------------

def test_normalize_w_identity():
    ens = InitialEnsemble.gaussian(0.05, 21)
    initial = ensemble_distribution(IDLE, ens, 32)
    w = normalize_W(initial, initial)
    assert w.mode == "W_p"
    assert w.density[w.center_index()] == 1.0


def test_normalize_w_scale_invariance():
    ens = InitialEnsemble.gaussian(0.05, 21)
    initial = ensemble_distribution(IDLE, ens, 32)
    final = ensemble_distribution(loschmidt_train(4, 1.0, 2.0), ens, 32)
    doubled_f = MomentumDistribution(final.grid, 2.0 * final.density, "W_p")
    doubled_i = MomentumDistribution(initial.grid, 2.0 * initial.density, "W_p")
    assert np.array_equal(
        normalize_W(final, initial).density, normalize_W(doubled_f, doubled_i).density
    )


def test_normalize_w_grid_mismatch():
    ens = InitialEnsemble.gaussian(0.05, 21)
    a = ensemble_distribution(IDLE, ens, 32)
    b = ensemble_distribution(IDLE, ens, 64)
    with pytest.raises(ValueError):
        normalize_W(a, b)


def test_normalize_w_zero_center():
    grid = uniform_grid()
    dens = np.zeros_like(grid)
    dens[0] = 1.0 / 0.01
    flat = MomentumDistribution(grid, dens, "raw")
    with pytest.raises(ZeroDivisionError):
        normalize_W(flat, flat)


def test_fig1_return_is_exact_for_central_member():
    # W at p = 0 after the N=10, eps=2, phi=2.5 train returns to its initial
    # value; pinned with the dense oracle
    ens = InitialEnsemble.gaussian(0.0, 1)
    initial = ensemble_distribution(IDLE, ens, 64)
    final = ensemble_distribution(loschmidt_train(10, 2.0, 2.5), ens, 64)
    w = normalize_W(final, initial)
    assert abs(w.density[w.center_index()] - ECHO_P0_FINAL) < 1e-12


# --- resolution convolution ----------------------------------------------------

def test_convolve_delta_gives_gaussian():
    spacing = 0.01
    grid = uniform_grid(spacing)
    dens = np.zeros_like(grid)
    dens[len(grid) // 2] = 1.0 / spacing
    out = convolve_resolution(MomentumDistribution(grid, dens), 0.3)
    expected = np.exp(-(grid**2) / (2 * 0.3**2))
    expected /= expected.sum() * spacing
    sel = np.abs(grid) <= 0.9
    assert np.max(np.abs(out.density[sel] - expected[sel]) / expected[sel]) < 1e-3
    assert_allclose(fwhm_central_peak(out) / gaussian_fwhm(1.0), 0.3, rtol=1e-3)


def test_convolve_zero_width_is_identity():
    dist = gaussian_dist(0.2)
    out = convolve_resolution(dist, 0.0)
    assert out is not dist
    assert np.array_equal(out.density, dist.density)


def test_convolve_variance_additivity():
    out = convolve_resolution(gaussian_dist(0.2), 0.3)
    measured = fwhm_central_peak(out) / gaussian_fwhm(1.0)
    assert_allclose(measured, np.sqrt(0.2**2 + 0.3**2), rtol=0.02)


def test_convolve_preserves_mass():
    ens = InitialEnsemble.gaussian(0.05, 51)
    dist = ensemble_distribution(loschmidt_train(6, 1.0, 2.0), ens, 64)
    out = convolve_resolution(dist, 0.43)
    assert abs(out.integral() - dist.integral()) < 1e-9


def test_convolve_under_resolved_warning():
    dist = gaussian_dist(0.2)
    with pytest.warns(ResolutionWarning):
        convolve_resolution(dist, 0.004)


def test_convolve_rejects_negative_width():
    with pytest.raises(ValueError):
        convolve_resolution(gaussian_dist(0.2), -0.1)


def test_calibrated_resolution():
    sig = calibrated_resolution(0.05)
    assert_allclose(np.hypot(sig, 0.05), 0.43, rtol=1e-14)
    with pytest.raises(ValueError):
        calibrated_resolution(0.5)
    # measured check: convolving the initial ensemble gives width 0.43
    ens = InitialEnsemble.gaussian(0.05, 201)
    conv = convolve_resolution(ensemble_distribution(IDLE, ens, 32), sig)
    assert_allclose(fwhm_central_peak(conv) / gaussian_fwhm(1.0), 0.43, rtol=1e-3)


# --- FWHM ----------------------------------------------------------------------

def test_fwhm_gaussian():
    assert_allclose(fwhm_central_peak(gaussian_dist(0.2)), gaussian_fwhm(0.2), rtol=0.005)


def test_fwhm_triangle():
    spacing, w = 0.004, 0.3
    grid = uniform_grid(spacing, 500)
    dens = np.maximum(0.0, 1.0 - np.abs(grid) / w)
    dens /= dens.sum() * spacing
    assert_allclose(fwhm_central_peak(MomentumDistribution(grid, dens)), w, rtol=1e-10)


def test_fwhm_scale_invariance():
    dist = gaussian_dist(0.2, mode="W_p")
    scaled = MomentumDistribution(dist.grid, 4.0 * dist.density, "W_p")
    assert fwhm_central_peak(scaled) == fwhm_central_peak(dist)
    scaled = MomentumDistribution(dist.grid, 3.7 * dist.density, "W_p")
    assert abs(fwhm_central_peak(scaled) - fwhm_central_peak(dist)) < 1e-12


def test_fwhm_degenerate_inputs():
    grid = uniform_grid()
    flat = MomentumDistribution(grid, np.full_like(grid, 1.0 / (grid[-1] - grid[0] + 0.01)), "W_p")
    with pytest.raises(AnalysisError):
        fwhm_central_peak(flat)
    off = gaussian_dist(0.1, center=2.0, mode="W_p")
    with pytest.raises(AnalysisError):
        fwhm_central_peak(off)


# --- order heights and P(0) ------------------------------------------------------

def comb_distribution(heights, spacing=0.01):
    # columns of 31 samples centered on even-recoil orders
    grid = uniform_grid(spacing)
    center = len(grid) // 2
    per_order = int(round(2.0 / spacing))
    dens = np.zeros_like(grid)
    for n, h in heights.items():
        i = center + n * per_order
        dens[i - 15 : i + 16] = h
    dens /= dens.sum() * spacing
    return MomentumDistribution(grid, dens)


def test_p0_all_in_zero_order():
    assert p0_fraction(comb_distribution({0: 1.0})) == 1.0


def test_p0_equal_orders():
    dist = comb_distribution({n: 1.0 for n in range(-2, 3)})
    assert_allclose(p0_fraction(dist), 0.2, rtol=1e-12)


def test_p0_bounds_and_support():
    dist = gaussian_dist(0.1)
    assert p0_fraction(dist) == 1.0
    ens = InitialEnsemble.gaussian(0.05, 41)
    out = ensemble_distribution(loschmidt_train(6, 1.0, 2.0), ens, 64)
    assert 0.0 <= p0_fraction(out) <= 1.0


def test_order_heights_metrics():
    dist = comb_distribution({0: 2.0, 1: 1.0})
    orders, by_height = order_heights(dist, "height")
    _, by_mass = order_heights(dist, "integrated")
    i0 = int(np.nonzero(orders == 0)[0][0])
    i1 = int(np.nonzero(orders == 1)[0][0])
    assert_allclose(by_height[i0] / by_height[i1], 2.0, rtol=1e-12)
    assert_allclose(by_mass[i0] / by_mass[i1], 2.0, rtol=1e-12)
    with pytest.raises(ValueError):
        order_heights(dist, "area")


def test_analyze_distribution():
    ens = InitialEnsemble.gaussian(0.05, 41)
    final, per_kick = ensemble_distribution(
        loschmidt_train(6, 1.0, 2.0), ens, 64, record=True
    )
    res = analyze_distribution(final, per_kick=per_kick)
    assert res.fwhm > 0
    assert res.p0_fraction == p0_fraction(final)
    assert [k for k, _ in res.per_kick] == [1, 2, 3, 4, 5, 6]
    assert res.order_heights.sum() > 0


# --- distribution validation -----------------------------------------------------

def test_distribution_validation():
    grid = uniform_grid()
    with pytest.raises(ValueError):
        MomentumDistribution(grid, np.ones(3))
    dens = np.full_like(grid, -1.0)
    with pytest.raises(ValueError):
        MomentumDistribution(grid, dens, "W_p")
    with pytest.raises(ValueError):
        MomentumDistribution(grid, np.abs(np.ones_like(grid)), "raw")  # mass != 1
    with pytest.raises(ValueError):
        MomentumDistribution(grid, np.zeros_like(grid), "density")
