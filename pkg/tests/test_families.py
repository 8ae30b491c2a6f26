"""Tests for the concrete map families."""

import numpy as np
import pytest

from repeller_lab.geometry import centered, lebesgue_estimate, torus_distance, wrap
from repeller_lab.families import (
    DiazVianaFamily,
    HopfModel2D,
    HopfModel3D,
    LinearToy2D,
    TriplingToy,
    disk_trap,
    escape_time,
    invariant_circle_radius,
    jacobian_bounds_check,
    survivor_grid,
    verify_trap,
)

A2 = np.array([[3.0, -1.0], [1.0, 3.0]])
A3 = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, -10.0, 0.0]])


def torus_gap(a, b):
    return np.abs((a - b + 0.5) % 1.0 - 0.5).max()


# ------------------------------------------------------------ planar model

def test_neutral_circle_radius_closed_form():
    # with the default pure-slope profile, Phi(w) = 1 - mu + 60 w
    for mu in (0.01, 0.05, 0.1):
        model = HopfModel2D(mu)
        assert model.rho_inv == pytest.approx(np.sqrt(mu / 60.0), abs=1e-10)
        assert invariant_circle_radius(model) == model.rho_inv
    assert invariant_circle_radius(HopfModel2D(0.1), mu=0.0) == 0.0
    assert invariant_circle_radius(HopfModel2D(0.1), mu=0.025) == pytest.approx(
        np.sqrt(0.025 / 60.0), abs=1e-10)


def test_radius_first_order_against_derived_slope():
    model = HopfModel2D(0.01)
    assert model.rho_inv == pytest.approx(np.sqrt(0.01 / model.b1), rel=1e-6)


def test_radius_scaling_slope_one_half():
    model = HopfModel2D(0.01)
    mus = np.geomspace(1e-4, 1e-2, 9)
    rhos = [invariant_circle_radius(model, mu=m) for m in mus]
    slope = np.polyfit(np.log(mus), np.log(rhos), 1)[0]
    assert slope == pytest.approx(0.5, abs=0.05)


def test_derived_constants():
    model = HopfModel2D(0.1)
    assert model.mu_f == pytest.approx(np.pi * model.rho_inv ** 2, rel=1e-12)
    assert model.K == pytest.approx(60.0 / np.pi, rel=1e-6)
    assert model.c0 == pytest.approx(model.K / 256.0, rel=1e-12)
    assert model.delta_mu == pytest.approx(0.1, rel=1e-6)
    assert model.S == pytest.approx(1.0, abs=1e-9)
    assert model.K_mu == pytest.approx(model.K, rel=1e-9)


def test_hole_volume_against_monte_carlo():
    model = HopfModel2D(0.01)
    measured, half = lebesgue_estimate(model.hole, budget=200_000, seed=4)
    assert abs(measured - np.pi * model.rho_inv ** 2) < half


def test_step_matches_linear_action_far_from_origin():
    model = HopfModel2D(0.1)
    rng = np.random.default_rng(5)
    pts = rng.random((5000, 2))
    far = np.sum(centered(pts) ** 2, axis=1) > 2 * model.delta0
    expect = wrap(centered(pts[far]) @ A2.T)
    assert torus_gap(model.step(pts[far]), expect) < 1e-10


def test_neutral_circle_is_invariant_and_rotates():
    model = HopfModel2D(0.1)
    theta = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    pts = wrap(model.rho_inv * np.stack([np.cos(theta), np.sin(theta)], axis=1))
    img = centered(model.step(pts))
    assert np.sqrt(np.sum(img ** 2, axis=1)) == pytest.approx(model.rho_inv, abs=1e-12)
    angles = np.arctan2(img[:, 1], img[:, 0])
    gap = (angles - theta - model.alpha + np.pi) % (2 * np.pi) - np.pi
    assert np.abs(gap).max() < 1e-9


def test_symbols_partition_evenly_and_hole_is_masked():
    model = HopfModel2D(0.1)
    rng = np.random.default_rng(0)
    pts = rng.random((100_000, 2))
    syms = model.symbol_of(pts)
    frac_hole = (syms == -1).mean()
    assert frac_hole == pytest.approx(model.mu_f, abs=0.002)
    counts = np.bincount(syms[syms >= 0], minlength=10) / (syms >= 0).sum()
    assert np.abs(counts - 0.1).max() < 0.01


def test_hole_sits_inside_branch_zero():
    model = HopfModel2D(0.1)
    theta = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    rim = wrap(0.999 * model.rho_inv
               * np.stack([np.cos(theta), np.sin(theta)], axis=1))
    assert np.all(model._linear_symbols(rim) == 0)
    assert np.all(model.symbol_of(rim) == -1)


def test_inverse_branches_roundtrip_and_hole_has_no_branch_zero_preimage():
    model = HopfModel2D(0.1)
    rng = np.random.default_rng(1)
    pts = rng.random((300, 2))
    defined = 0
    for s in range(10):
        inv = model.inverse_branch(s, pts)
        ok = ~np.isnan(inv).any(axis=1)
        defined += ok.sum()
        assert torus_gap(model.step(inv[ok]), pts[ok]) < 1e-12
        assert np.all(model.symbol_of(inv[ok]) == s)
    # exactly one preimage per branch except where it falls into the hole
    assert 10 * len(pts) - defined == pytest.approx(
        10 * len(pts) * model.mu_f, abs=0.03 * 10 * len(pts))


def finite_difference_jacobian(model, p, h=1e-7):
    d = len(p)
    fd = np.empty((d, d))
    for j in range(d):
        dp = np.zeros(d)
        dp[j] = h
        diff = model.step((p + dp)[None, :]) - model.step((p - dp)[None, :])
        diff = (diff + 0.5) % 1.0 - 0.5  # unwrap before dividing
        fd[:, j] = diff[0] / (2 * h)
    return fd


def test_jacobian_matrices_match_finite_differences():
    model = HopfModel2D(0.1)
    pts = np.array([[0.03, 0.02], [0.09, 0.05], [0.3, 0.7], [0.11, 0.02]])
    J = model.jacobian_matrices(pts)
    for k, p in enumerate(pts):
        assert np.allclose(J[k], finite_difference_jacobian(model, p),
                           rtol=1e-4, atol=1e-5)


def test_singular_values_match_svd():
    model = HopfModel2D(0.1)
    rng = np.random.default_rng(2)
    pts = rng.random((200, 2)) * 0.25  # bias toward the deformation disk
    lo, hi = model.singular_values(pts)
    sv = np.linalg.svd(model.jacobian_matrices(pts), compute_uv=False)
    assert np.allclose(sv[:, -1], lo, rtol=1e-10)
    assert np.allclose(sv[:, 0], hi, rtol=1e-10)
    assert np.allclose(model.deriv_inverse_norm(pts), 1 / lo, rtol=1e-12)


def test_branch_expansion_floors():
    model = HopfModel2D(0.1)
    assert model.lambda_min(0) == 0.0
    assert model.lambda_min(3) == pytest.approx(0.5 * np.log(10))
    # least stretch over branch 0 approaches but never undercuts the floor
    rng = np.random.default_rng(3)
    pts = rng.random((50_000, 2))
    sel = model.symbol_of(pts) == 0
    assert model.log_least_stretch(pts[sel]).min() >= -1e-12
    model0 = HopfModel2D(-0.05)
    assert model0.lambda_min(0) == pytest.approx(np.log(1.05))


def test_lip_bound_dominates_observed_stretch():
    model = HopfModel2D(0.1)
    rng = np.random.default_rng(7)
    base = rng.random((200, 2)) * 0.3
    rad = 0.01
    bound = model.lip_bound(base, rad)
    for k, p in enumerate(base):
        probe = p + rng.normal(size=(64, 2)) * rad / 3
        probe = probe[np.sqrt(np.sum((probe - p) ** 2, axis=1)) <= rad]
        d1 = torus_distance(model.step(probe), model.step(p[None, :]))
        d0 = np.sqrt(np.sum((probe - p) ** 2, axis=1))
        good = d0 > 1e-12
        assert np.all(d1[good] <= bound[k] * d0[good] * (1 + 1e-6))


# ------------------------------------------------------- Jacobian floors

def test_jacobian_floors_sampled():
    report = jacobian_bounds_check(HopfModel2D(0.02), samples=100_000, seed=0)
    assert report.passed
    assert report.min_outside_inner_disk >= report.bound_outside_inner_disk
    assert report.min_outside_hole >= report.bound_outside_hole


def test_jacobian_floor_crossing_parameter():
    report = jacobian_bounds_check(HopfModel2D(0.02), samples=1000, seed=0)
    # analytic infimum log(1+2mu) meets (61/32) mu just below mu = 0.05
    assert report.mu_cross == pytest.approx(0.049975, abs=1e-4)
    r2 = jacobian_bounds_check(HopfModel2D(0.06), samples=1000, seed=0)
    assert r2.analytic_min_outside_hole < r2.bound_outside_hole


def test_jacobian_inside_hole_is_contracting_at_fixed_point():
    model = HopfModel2D(0.1)
    at_zero = model.jacobian_log(np.array([[0.0, 0.0]]))
    assert at_zero[0] == pytest.approx(2 * np.log(1 - 0.1), abs=1e-12)
    assert at_zero[0] < 0


# ------------------------------------------------------------- escapes

def test_escape_inside_circle_is_fast():
    model = HopfModel2D(0.1)
    pts = np.array([[0.01, 0.0], [0.02, 0.015], [0.005, 0.005]])
    survives, steps = escape_time(model, pts, horizon=200)
    assert not survives.any()
    assert steps.max() < 10 / 0.1  # contraction rate ~ (1 - mu) per step


def test_on_circle_point_survives():
    # the neutral circle is radially repelling, so float rounding drifts an
    # on-circle orbit off it at rate (1+2mu)^k; 100 steps keeps the drift
    # around 1e-8, far from the trap at rho_inv/2
    model = HopfModel2D(0.1)
    pts = np.array([[model.rho_inv, 0.0]])
    survives, steps = escape_time(model, pts, horizon=100)
    assert survives[0] and steps[0] == 100


def test_no_attractor_before_bifurcation():
    model = HopfModel2D(-0.02)
    rng = np.random.default_rng(0)
    survives, steps = escape_time(model, rng.random((1000, 2)), horizon=200)
    assert survives.all()
    assert not model.trap_advisory


def test_trap_invariance_both_models():
    m2 = HopfModel2D(0.1)
    assert verify_trap(m2, m2.default_trap(), samples=10_000)
    m3 = HopfModel3D(0.1)
    assert verify_trap(m3, m3.default_trap(), samples=10_000)


def test_survivor_grid_drops_hole_interior():
    model = HopfModel2D(0.1)
    surv = survivor_grid(model, 128, horizon=50)
    assert 0 < len(surv) < 128 * 128
    inside = np.sum(centered(surv) ** 2, axis=1) < (model.rho_inv / 2) ** 2
    assert not inside.any()


# ------------------------------------------------------------ spatial model

def test_spectrum_certificate():
    model = HopfModel3D(0.1)
    assert abs(np.linalg.det(A3)) == pytest.approx(1.0, abs=1e-12)
    assert model.lam * model.sigma ** 2 == pytest.approx(1.0, abs=1e-10)
    assert model.sigma > 3.0
    assert model.lam < 1.0 / 9.0
    assert np.allclose(A3 @ model.P, model.P @ model.M, atol=1e-10)


def test_spatial_step_matches_linear_action_far_out():
    model = HopfModel3D(0.1)
    rng = np.random.default_rng(6)
    pts = rng.random((5000, 3))
    _, w, z = model._coords(pts)
    far = (w > 2 * model.delta0)
    expect = wrap(centered(pts[far]) @ A3.T)
    assert torus_gap(model.step(pts[far]), expect) < 1e-10


def test_spatial_origin_block_structure_at_bifurcation():
    model = HopfModel3D(0.0)
    J = model.jacobian_matrices(np.array([[0.0, 0.0, 0.0]]))[0]
    local = model.P_inv @ J @ model.P
    rot = local[:2, :2]
    # radial block is a pure rotation (neutral factor Phi(0) = 1)
    assert np.allclose(rot @ rot.T, np.eye(2), atol=1e-10)
    assert np.linalg.norm(rot[:, 0]) == pytest.approx(1.0, abs=1e-10)
    assert local[2, 2] == pytest.approx(model.lam, abs=1e-10)
    assert np.allclose(local[2, :2], 0.0, atol=1e-12)


def test_spatial_jacobian_matches_finite_differences():
    model = HopfModel3D(0.1)
    pts = np.array([[0.05, 0.03, 0.004], [0.02, 0.01, 0.015], [0.4, 0.7, 0.2]])
    J = model.jacobian_matrices(pts)
    for k, p in enumerate(pts):
        assert np.allclose(J[k], finite_difference_jacobian(model, p),
                           rtol=1e-4, atol=1e-4)


def test_spatial_survivors_without_attractor():
    model = HopfModel3D(-0.01)
    surv = survivor_grid(model, 16, horizon=20)
    assert len(surv) == 16 ** 3


# ------------------------------------------------------------ 1D families

def test_tripling_basics():
    toy = TriplingToy()
    x = np.array([[0.1], [0.8], [0.5]])
    assert np.allclose(toy.step(x)[:, 0], [0.3, 0.4, 0.5])
    assert toy.symbol_of(x).tolist() == [0, 1, -1]
    assert toy.lambda_min(0) == pytest.approx(np.log(3))
    inv0 = toy.inverse_branch(0, np.array([[0.6]]))
    inv1 = toy.inverse_branch(1, np.array([[0.6]]))
    assert inv0[0, 0] == pytest.approx(0.2)
    assert inv1[0, 0] == pytest.approx(2.6 / 3)


def test_diaz_viana_construction_grid():
    for t in (0.04, 0.1, 0.25, 0.5, 0.9):
        fam = DiazVianaFamily(t)
        assert fam.c2 > 0
        assert fam.mu_f == pytest.approx(np.sqrt(t))
        # degree two: the lift gains exactly 2 - 2r over the domain
        assert fam.lift(1 - fam.r) == pytest.approx(2 - fam.r, abs=1e-12)
        # expansion margin: derivative >= 1 + sqrt(t) everywhere off the hole
        u = np.linspace(fam.r, 1 - fam.r, 4001)
        assert fam.derivative(u).min() >= fam.c1 - 1e-12
        assert fam.derivative(np.array([fam.r, 1 - fam.r])) == pytest.approx(fam.c1)
        assert fam.lambda_min(0) > 0 and fam.lambda_min(1) > 0
        assert fam.S == pytest.approx(1 / fam.c1)


def test_diaz_viana_rejects_bad_parameters():
    for t in (0.0, 1.0, 1.5, -0.2):
        with pytest.raises(ValueError):
            DiazVianaFamily(t)


def test_diaz_viana_branch_structure():
    fam = DiazVianaFamily(0.25)
    assert fam.lift(fam.u_mid) == pytest.approx(1 + fam.r, abs=1e-12)
    y = np.linspace(0, 1, 101)[:, None]
    inv0 = fam.inverse_branch(0, y)
    assert not np.isnan(inv0).any()  # first branch covers the whole circle
    assert torus_gap(fam.step(inv0), wrap(y)) < 1e-9
    inv1 = fam.inverse_branch(1, y)
    in_hole = fam.in_hole(y)
    assert np.isnan(inv1[in_hole, 0]).all()  # hole points: no second preimage
    ok = ~np.isnan(inv1[:, 0])
    assert torus_gap(fam.step(inv1[ok]), wrap(y[ok])) < 1e-9


def test_diaz_viana_hole_shrinks_with_t():
    lengths = [DiazVianaFamily(t).mu_f for t in (0.5, 0.1, 0.01, 0.001)]
    assert all(b < a for a, b in zip(lengths, lengths[1:]))


def test_linear_toy_is_conformal_full_shift():
    toy = LinearToy2D()
    rng = np.random.default_rng(0)
    pts = rng.random((1000, 2))
    assert np.all(toy.symbol_of(pts) >= 0)
    assert toy.lambda_min(4) == pytest.approx(0.5 * np.log(10))
    assert np.allclose(toy.deriv_inverse_norm(pts), 1 / np.sqrt(10))
    for s in (0, 7):
        inv = toy.inverse_branch(s, pts[:100])
        assert not np.isnan(inv).any()
        assert torus_gap(toy.step(inv), pts[:100]) < 1e-12
