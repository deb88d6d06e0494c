import math

import numpy as np
import pytest

from eulerwave import Grid, chaplygin, polytropic
from eulerwave import shock1d as sh
from eulerwave.errors import PostBlowupError
from eulerwave.state import compute_derived

GAMMA = 1.4
AMP = 0.5


@pytest.fixture(scope="module")
def rmap():
    return sh.build_riemann_map(polytropic(GAMMA), s_const=0.0)


@pytest.fixture(scope="module")
def fan(rmap):
    return sh.build_fan(rmap, sh.sinusoidal_profile(AMP))


def f_closed_form(rho, gamma=GAMMA):
    # dF/drho = c = exp((gamma-1) rho / 2) at s = 0, F(0) = 0
    return 2.0 / (gamma - 1.0) * (math.exp(0.5 * (gamma - 1.0) * rho) - 1.0)


def test_riemann_map_against_closed_form(rmap):
    assert rmap.F(0.0) == 0.0
    for rho in (-0.8, -0.2, 0.1, 0.5, 1.3):
        assert rmap.F(rho) == pytest.approx(f_closed_form(rho), abs=1e-12)
        assert float(rmap.f_values(rho)) == pytest.approx(rmap.F(rho),
                                                          abs=1e-12)


def test_riemann_map_monotone_and_invertible(rmap):
    rho = np.linspace(-1.5, 1.5, 201)
    f = rmap.f_values(rho)
    assert np.all(np.diff(f) > 0.0)
    assert np.max(np.abs(rmap.f_inverse(f) - rho)) <= 1e-10


def test_riemann_invariants_round_trip():
    rmap2 = sh.build_riemann_map(polytropic(2.0), s_const=0.0)
    v1, rho = 0.13, -0.27
    r_plus, r_minus = sh.riemann_invariants(v1, rho, rmap2)
    v_back, rho_back = sh.invert_riemann(r_plus, r_minus, rmap2)
    assert float(v_back) == pytest.approx(v1, abs=1e-12)
    assert float(rho_back) == pytest.approx(rho, abs=1e-10)
    r_plus0, r_minus0 = sh.riemann_invariants(0.0, 0.0, rmap2)
    assert abs(r_plus0) <= 1e-12 and abs(r_minus0) <= 1e-12


def test_blowup_time_closed_form_and_bruteforce(fan):
    # lam = 1 + (gamma+1)/4 * R for this equation of state, so
    # T* = 1 / ((gamma+1)/4 * amplitude)
    t_star_exact = 1.0 / ((GAMMA + 1.0) / 4.0 * AMP)
    assert fan.valid_until == pytest.approx(t_star_exact, rel=1e-6)
    t_cross = sh.crossing_time_bruteforce(fan)
    assert t_cross == pytest.approx(fan.valid_until, rel=1e-3)


def test_expansion_and_constant_profiles(rmap):
    const_fan = sh.build_fan(rmap, lambda x0: np.full_like(np.asarray(x0,
                                                           dtype=float), 0.2))
    assert math.isinf(const_fan.valid_until)
    assert math.isinf(sh.crossing_time_bruteforce(const_fan))
    r, v1, rho = sh.simple_wave_solution(const_fan, 50.0, 1.0)
    assert r == pytest.approx(0.2, abs=1e-12)
    assert sh.mu_star(const_fan, 50.0) == pytest.approx(
        sh.mu_star(const_fan, 0.0), rel=1e-12)


def test_chaplygin_fan_is_degenerate():
    rmap_ch = sh.build_riemann_map(chaplygin(0.0, 1.0), s_const=0.0)
    fan_ch = sh.build_fan(rmap_ch, sh.sinusoidal_profile(AMP))
    assert math.isinf(fan_ch.valid_until)
    assert np.max(np.abs(fan_ch.lam_prime)) <= 1e-9
    t_poly_star = 1.0 / ((GAMMA + 1.0) / 4.0 * AMP)
    horizon = 10.0 * t_poly_star
    assert sh.mu_star(fan_ch, horizon) >= 0.5
    base = sh.max_abs_dxv1(fan_ch, 0.0)
    drift = max(abs(sh.max_abs_dxv1(fan_ch, t) - base)
                for t in np.linspace(0.0, horizon, 21))
    assert drift <= 0.01 * base


def test_solution_reproduces_profile_at_t0(fan):
    x = np.linspace(0.0, 2.0 * np.pi, 33)[:-1]
    r, v1, rho = sh.simple_wave_solution(fan, 0.0, x)
    assert np.max(np.abs(r - AMP * np.sin(x))) <= 1e-12
    assert np.max(np.abs(v1 - 0.5 * r)) == 0.0


def test_r_plus_conserved_along_characteristics(fan):
    for x0 in (0.3, 2.0, 4.4):
        lam = float(fan.lam_of(x0))
        for t in (0.2, 0.5, 1.0):
            r, _, _ = sh.simple_wave_solution(fan, t, x0 + lam * t)
            assert r == pytest.approx(AMP * math.sin(x0), abs=1e-10)


def test_gradient_amplification_jacobian_oracle(fan):
    # max |d_x R+ (t)| = max |R0'(x0)| / (1 + t lam'(x0)) versus a 5-point
    # finite difference of the reconstructed field near the maximizer
    t = 0.5 * fan.valid_until
    jac = 1.0 + t * fan.lam_prime
    predicted = np.max(np.abs(sh._periodic_derivative(
        fan.r_plus0, fan.foot_points[1] - fan.foot_points[0])) / jac)
    x0_star = fan.foot_points[int(np.argmax(
        np.abs(sh._periodic_derivative(fan.r_plus0,
                                       fan.foot_points[1] - fan.foot_points[0]))
        / jac))]
    x_star = x0_star + float(fan.lam_of(x0_star)) * t
    h = 1e-4

    def r_at(x):
        return sh.simple_wave_solution(fan, t, x)[0]

    fd = (8.0 * (r_at(x_star + h) - r_at(x_star - h))
          - (r_at(x_star + 2 * h) - r_at(x_star - 2 * h))) / (12.0 * h)
    assert abs(abs(fd) - predicted) <= 1e-6 * max(1.0, predicted)


def test_eikonal_initial_normalization(fan):
    for x in (0.5, 2.2, 5.1):
        u, mu = sh.eikonal_mu(fan, 0.0, x)
        assert u == pytest.approx(1.0 - x, abs=1e-12)
        c = fan.state_of(x)[2]
        assert mu == pytest.approx(1.0 / float(c), rel=1e-9)
        assert mu * float(c) == pytest.approx(1.0, rel=1e-9)


def test_eikonal_mu_matches_defining_formula(fan):
    # mu = -1 / ((g^-1)^{a b} d_a t d_b u) = 1 / (d_t u + v^1 d_x u),
    # cross-checked by finite differencing u(t, x)
    t0, x0 = 1.0, 2.0
    delta = 1e-5

    def u_at(t, x):
        return sh.eikonal_mu(fan, t, x)[0]

    du_dt = (u_at(t0 + delta, x0) - u_at(t0 - delta, x0)) / (2 * delta)
    du_dx = (u_at(t0, x0 + delta) - u_at(t0, x0 - delta)) / (2 * delta)
    assert du_dt > 0.0
    _, v1, rho = sh.simple_wave_solution(fan, t0, x0)
    mu_fd = 1.0 / (du_dt + v1 * du_dx)
    _, mu = sh.eikonal_mu(fan, t0, x0)
    assert mu == pytest.approx(mu_fd, rel=1e-5)


def test_mu_grows_on_expansion_side(fan):
    # at a foot point with lam' > 0 the characteristics spread and mu grows
    j = int(np.argmax(fan.lam_prime))
    x0 = fan.foot_points[j]
    c = fan.state_of(x0)[2]
    t = 0.5 * fan.valid_until
    mu_t = (1.0 + t * fan.lam_prime[j]) / float(c)
    mu_0 = 1.0 / float(c)
    assert mu_t > mu_0


def test_mu_star_vanishes_linearly(fan):
    t_star = fan.valid_until
    ts = np.linspace(0.8 * t_star, 0.99 * t_star, 25)
    mus = np.array([sh.mu_star(fan, t) for t in ts])
    coeffs = np.polyfit(ts, mus, 1)
    fit = np.polyval(coeffs, ts)
    r2 = 1.0 - np.sum((mus - fit) ** 2) / np.sum((mus - np.mean(mus)) ** 2)
    assert r2 >= 0.999
    assert -coeffs[1] / coeffs[0] == pytest.approx(t_star, rel=0.01)


def test_blowup_product_bounded_while_gradient_blows_up(fan):
    t_late = 0.99 * fan.valid_until
    growth = sh.max_abs_dxv1(fan, t_late) / sh.max_abs_dxv1(fan, 0.0)
    assert growth >= 50.0
    for t in np.linspace(0.0, t_late, 12):
        assert 0.1 <= sh.blowup_product_check(fan, t) <= 10.0


def test_post_blowup_queries_rejected(fan):
    with pytest.raises(PostBlowupError):
        sh.simple_wave_solution(fan, fan.valid_until * 1.01, 0.0)
    with pytest.raises(PostBlowupError):
        sh.mu_star(fan, fan.valid_until)


def test_embedding_into_3d(fan, polytropic_gas):
    grid = Grid(16, order=4)
    state = sh.embed_plane_wave_3d(fan, 0.0, grid)
    x = grid.axis_coordinates()
    _, v1, rho = sh.simple_wave_solution(fan, 0.0, x)
    for j, k in ((0, 0), (5, 11), (15, 3)):
        assert np.array_equal(state.v[0][:, j, k], np.asarray(v1))
        assert np.array_equal(state.rho_log[:, j, k], np.asarray(rho))
    assert np.all(state.v[1] == 0.0) and np.all(state.v[2] == 0.0)
    derived = compute_derived(state)
    floor = 1e-13 / grid.h ** 2
    assert np.max(np.abs(derived.omega)) <= floor
    assert np.all(derived.grad_ent == 0.0)
    assert np.max(np.abs(derived.curl_mod)) <= floor / grid.h
    assert np.all(derived.div_mod == 0.0)


def test_pde_run_matches_exact_solution(fan):
    t_half = 0.5 * fan.valid_until
    x, samples = sh.evolve_1d_samples(fan, n=1024, t_final=t_half,
                                      sample_times=[t_half])
    t_actual, rho, v1, s = samples[t_half]
    _, v_exact, rho_exact = sh.simple_wave_solution(fan, t_actual, x)
    assert np.max(np.abs(v1 - v_exact)) <= 1e-4
    assert np.max(np.abs(rho - rho_exact)) <= 1e-4
    assert np.max(np.abs(s)) <= 1e-12


def test_pde_blowup_estimate_matches_crossing_oracle(fan):
    est = sh.pde_blowup_estimate(fan, n=512)
    assert est["t_star"] == pytest.approx(sh.crossing_time_bruteforce(fan),
                                          rel=0.02)
