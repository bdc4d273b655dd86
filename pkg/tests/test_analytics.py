import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rankvar import (AttainerToken, CapabilityError, ContractError,
                     DiscreteSymmetricSpec, FrechetWeights, MixtureMoments,
                     Preference, ShuffleSpec, beta_clayton, beta_closed_form,
                     clayton, comonotone, counter_monotone, envelope_frechet,
                     frechet, gaussian, independence, kappa_discrete,
                     kappa_frechet, make_builtin, optimal_shift_analytic,
                     optimal_shifted_sigma2, prefer, shuffle_of_m, sigma2_beta,
                     sigma2_closed_form, sigma2_discrete, sigma2_frechet,
                     sigma2_from_covariances, sigma2_nvm,
                     sigma2_nvm_from_var_x2, sigma2_tau_analytic, shifted,
                     squared_copula, student_t, tau_closed_form, tau_frechet)

BERN = make_builtin("bernoulli")
UNIF = make_builtin("uniform")
NORM = make_builtin("normal")


def simplex_grid(steps: int) -> list[FrechetWeights]:
    pts = []
    for i in range(steps + 1):
        for j in range(steps + 1 - i):
            pts.append(FrechetWeights(i / steps, j / steps,
                                      (steps - i - j) / steps))
    return pts


# ---------------------------------------------------------------------------
# the covariance identity and Frechet closed forms
# ---------------------------------------------------------------------------

def test_sigma2_from_covariances():
    assert sigma2_from_covariances(0.0, 0.0) == 1.0
    assert sigma2_from_covariances(2.0, 1.0) == 2.0      # comonotone shape
    assert sigma2_from_covariances(2.0, 0.0) == 3.0      # mixture ceiling shape


def test_sigma2_frechet_examples():
    assert sigma2_frechet(NORM, FrechetWeights(1, 0, 0)) == 2.0
    assert sigma2_frechet(BERN, FrechetWeights(0.5, 0, 0.5)) == 1.0
    assert sigma2_frechet(UNIF, FrechetWeights(0, 1, 0)) == 1.0


def test_sigma2_frechet_rejects_shifted_laws():
    with pytest.raises(ContractError):
        sigma2_frechet(shifted(NORM, 0.5), FrechetWeights(1, 0, 0))


def test_kappa_tau_frechet_examples():
    assert kappa_frechet(FrechetWeights(1, 0, 0)) == 1.0
    assert tau_frechet(FrechetWeights(1, 0, 0)) == 1.0
    assert kappa_frechet(FrechetWeights(0.5, 0, 0.5)) == 0.0
    assert tau_frechet(FrechetWeights(0.5, 0, 0.5)) == 0.0
    assert kappa_frechet(FrechetWeights(0.5, 0.5, 0)) == 0.5
    assert tau_frechet(FrechetWeights(0.5, 0.5, 0)) == pytest.approx(5.0 / 12.0)


def test_concavity_on_simplex():
    # variance is concave over copula mixing
    grid = simplex_grid(20)
    v = 0.8
    arr = np.array([[w.p_m, w.p_w] for w in grid])
    f = (arr[:, 0] + arr[:, 1]) * v + 1.0 - (arr[:, 0] - arr[:, 1]) ** 2
    for p in (0.25, 0.5, 0.75):
        pm = p * arr[:, None, 0] + (1 - p) * arr[None, :, 0]
        pw = p * arr[:, None, 1] + (1 - p) * arr[None, :, 1]
        mixed = (pm + pw) * v + 1.0 - (pm - pw) ** 2
        assert np.all(mixed >= p * f[:, None] + (1 - p) * f[None, :] - 1e-12)


def test_linearity_on_constant_kappa_slices():
    # mixing weights with equal p_m - p_w leave the value linear
    pairs = [
        (FrechetWeights(0.6, 0.2, 0.2), FrechetWeights(0.4, 0.6, 0.0)),
        (FrechetWeights(0.5, 0.5, 0.0), FrechetWeights(0.7, 0.1, 0.2)),
    ]
    for w1, w2 in pairs:
        assert kappa_frechet(w1) == pytest.approx(kappa_frechet(w2))
        for p in (0.25, 0.5, 0.75):
            mixed = FrechetWeights(p * w1.p_m + (1 - p) * w2.p_m,
                                   p * w1.p_pi + (1 - p) * w2.p_pi,
                                   p * w1.p_w + (1 - p) * w2.p_w)
            want = (p * sigma2_frechet(UNIF, w1)
                    + (1 - p) * sigma2_frechet(UNIF, w2))
            assert sigma2_frechet(UNIF, mixed) == pytest.approx(want, abs=1e-12)


# ---------------------------------------------------------------------------
# envelopes and the preference order
# ---------------------------------------------------------------------------

def test_envelope_examples():
    env = envelope_frechet(BERN)
    assert env.best == 0.0 and env.worst == 1.0
    assert env.best_attainers == frozenset({AttainerToken.M, AttainerToken.W})
    assert env.worst_attainers == frozenset({AttainerToken.SEGMENT_MID_MW_PI})

    env = envelope_frechet(NORM)
    assert env.best == 1.0 and env.worst == 3.0
    assert env.best_attainers == frozenset({AttainerToken.PI})
    assert env.worst_attainers == frozenset({AttainerToken.MID_MW})

    env = envelope_frechet(UNIF)
    assert env.best == pytest.approx(0.8) and env.worst == pytest.approx(1.8)
    assert env.best_attainers == frozenset({AttainerToken.M, AttainerToken.W})


def test_envelope_boundary_attainers():
    # alpha = 1.5 puts Var(X^2) exactly at 1
    dist = make_builtin("beta", alpha=1.5)
    assert dist.var_x_squared == 1.0
    env = envelope_frechet(dist)
    assert env.best_attainers == frozenset(
        {AttainerToken.M, AttainerToken.PI, AttainerToken.W})


def test_envelope_matches_simplex_sweep():
    # oracle: dense sweep of the closed-form surface
    for dist in (BERN, UNIF, NORM, make_builtin("t", nu=10.0)):
        values = [sigma2_frechet(dist, w) for w in simplex_grid(200)]
        env = envelope_frechet(dist)
        assert min(values) == pytest.approx(env.best, abs=1e-9)
        assert max(values) == pytest.approx(env.worst, abs=1e-9)


def test_prefer_examples():
    assert prefer(BERN, UNIF) is Preference.FIRST
    assert prefer(UNIF, NORM) is Preference.FIRST
    assert prefer(NORM, UNIF) is Preference.SECOND
    assert prefer(NORM, NORM) is Preference.EQUIVALENT
    # documented chain: bernoulli before uniform before normal
    assert prefer(UNIF, BERN) is Preference.SECOND


# ---------------------------------------------------------------------------
# median-correlation and Kendall closed forms
# ---------------------------------------------------------------------------

def test_sigma2_beta_examples():
    assert sigma2_beta(independence()) == pytest.approx(1.0)
    assert sigma2_beta(comonotone()) == pytest.approx(0.0)
    assert sigma2_beta(gaussian(0.5)) == pytest.approx(8.0 / 9.0, abs=1e-14)


def test_sigma2_beta_equals_one_minus_beta_squared():
    for cop in (gaussian(-0.8), gaussian(0.3), clayton(2.0), clayton(-0.5),
                frechet(0.2, 0.3, 0.5), independence()):
        beta = beta_closed_form(cop)
        assert sigma2_beta(cop) == pytest.approx(1.0 - beta ** 2, abs=1e-12)


def test_beta_clayton_values():
    assert beta_clayton(2.0) == pytest.approx(4.0 / math.sqrt(7.0) - 1.0,
                                              abs=1e-15)
    assert beta_clayton(0.0) == 0.0
    assert beta_clayton(1e-12) == 0.0
    assert beta_clayton(-1.0) == pytest.approx(-1.0)
    with pytest.raises(ContractError):
        beta_clayton(-1.5)


def test_tau_closed_forms():
    assert tau_closed_form(clayton(2.0)) == pytest.approx(0.5)
    assert tau_closed_form(gaussian(0.5)) == pytest.approx(1.0 / 3.0)
    assert tau_closed_form(student_t(0.5, 5)) == pytest.approx(1.0 / 3.0)
    assert tau_closed_form(comonotone()) == 1.0
    assert tau_closed_form(counter_monotone()) == -1.0
    assert tau_closed_form(frechet(0.5, 0.5, 0.0)) == pytest.approx(5.0 / 12.0)
    with pytest.raises(CapabilityError):
        tau_closed_form(shuffle_of_m(ShuffleSpec.equal_strips((2, 1))))


def test_sigma2_tau_analytic():
    assert sigma2_tau_analytic(0.0) == 1.0
    assert sigma2_tau_analytic(0.5) == 0.75
    # elliptical copulas: same arcsine value for both measures
    for rho in (-0.7, 0.2, 0.9):
        tau = tau_closed_form(gaussian(rho))
        assert sigma2_tau_analytic(tau) == pytest.approx(sigma2_beta(gaussian(rho)),
                                                         abs=1e-12)
    with pytest.raises(ContractError):
        sigma2_tau_analytic(1.5)


# ---------------------------------------------------------------------------
# normal variance mixtures and optimal shifts
# ---------------------------------------------------------------------------

def test_sigma2_nvm_degenerate_mixer():
    moments = MixtureMoments(e_w=1.0, e_w2=1.0)
    assert sigma2_nvm(moments, 0.7) == pytest.approx(0.7 ** 2 + 1.0)
    assert sigma2_nvm(moments, 0.0) == 1.0


def test_sigma2_nvm_t10_consistency():
    # Var(X^2) = 3 for the standardized t(10): comonotone value must be 3
    assert sigma2_nvm_from_var_x2(3.0, 1.0) == pytest.approx(3.0, abs=1e-12)
    moments = MixtureMoments(e_w=1.0, e_w2=4.0 / 3.0)
    assert sigma2_nvm(moments, 1.0) == pytest.approx(3.0, abs=1e-12)


@given(st.floats(min_value=2.0, max_value=50.0))
def test_sigma2_nvm_extremes_equal_var_x2(var_x2):
    # both display forms agree, and the rho = +/-1 value is Var(X^2);
    # a mixture law always has Var(X^2) >= 2, the normal's value
    for rho in (-1.0, 1.0):
        assert sigma2_nvm_from_var_x2(var_x2, rho) == pytest.approx(
            var_x2, abs=1e-10)
    r = (var_x2 + 1.0) / 3.0
    moments = MixtureMoments(e_w=1.0, e_w2=r)
    assert sigma2_nvm(moments, 0.4) == pytest.approx(
        sigma2_nvm_from_var_x2(var_x2, 0.4), abs=1e-10)


def test_mixture_moments_jensen_guard():
    with pytest.raises(ContractError):
        MixtureMoments(e_w=2.0, e_w2=1.0)


def test_optimal_shift_analytic():
    assert optimal_shift_analytic(5.0, 0.0) == 0.0
    assert optimal_shift_analytic(0.0, 2.0) == 0.0
    assert optimal_shift_analytic(1.0, 2.0) == -0.5
    assert optimal_shifted_sigma2(3.0, 0.0, 0.0) == 3.0
    assert optimal_shifted_sigma2(3.0, 1.0, 2.0) == pytest.approx(2.5)


# ---------------------------------------------------------------------------
# discrete sums
# ---------------------------------------------------------------------------

BLOM = DiscreteSymmetricSpec(m=1, z=(1.0,), p=(0.0, 0.5))


def test_discrete_sums_blomqvist_examples():
    assert kappa_discrete(BLOM, comonotone()) == pytest.approx(1.0, abs=1e-12)
    assert sigma2_discrete(BLOM, comonotone()) == pytest.approx(0.0, abs=1e-12)
    assert kappa_discrete(BLOM, independence()) == pytest.approx(0.0, abs=1e-12)
    assert sigma2_discrete(BLOM, independence()) == pytest.approx(1.0, abs=1e-12)
    assert kappa_discrete(BLOM, gaussian(0.5)) == pytest.approx(1.0 / 3.0,
                                                                abs=1e-9)
    assert sigma2_discrete(BLOM, gaussian(0.5)) == pytest.approx(8.0 / 9.0,
                                                                 abs=1e-9)


def test_discrete_sums_four_point_law():
    # the four-point law has |z_i z_j| = a on the corner cells, so both
    # sums collapse to multiples of the corner mass
    a = 1.0 / math.sqrt(2.0)
    b = math.sqrt(1.0 - math.sqrt(2.0) / 2.0)
    spec = DiscreteSymmetricSpec(m=2, z=(b, a / b), p=(0.0, 0.25, 0.25))
    kap = kappa_discrete(spec, comonotone())
    sig = sigma2_discrete(spec, comonotone())
    assert kap == pytest.approx(1.0, abs=1e-12)
    # comonotone: X = Y, so Var(XY) = Var(X^2) = E[X^4] - 1
    m4 = 2 * 0.25 * (b ** 4 + (a / b) ** 4)
    assert sig == pytest.approx(m4 - 1.0, abs=1e-9)


def test_discrete_sums_capability_error_propagates():
    with pytest.raises(CapabilityError):
        kappa_discrete(BLOM, student_t(0.5, 5.0))


# ---------------------------------------------------------------------------
# the squared-pair copula
# ---------------------------------------------------------------------------

def test_squared_copula_identities():
    grid = np.linspace(0.0, 1.0, 9)
    for u in grid:
        for v in grid:
            assert squared_copula(independence(), u, v) == pytest.approx(
                u * v, abs=1e-12)
            assert squared_copula(comonotone(), u, v) == pytest.approx(
                min(u, v), abs=1e-12)
            assert squared_copula(counter_monotone(), u, v) == pytest.approx(
                min(u, v), abs=1e-12)


def test_squared_copula_mixture_linearity():
    c_a = frechet(0.6, 0.2, 0.2)
    c_b = frechet(0.1, 0.4, 0.5)
    p = 0.3
    mixed = frechet(0.25, 0.34, 0.41)
    for u, v in ((0.2, 0.9), (0.5, 0.5), (0.75, 0.3)):
        want = (p * squared_copula(c_a, u, v)
                + (1 - p) * squared_copula(c_b, u, v))
        assert squared_copula(mixed, u, v) == pytest.approx(want, abs=1e-10)


def test_squared_copula_requires_continuous_transform():
    with pytest.raises(ContractError):
        squared_copula(independence(), 0.5, 0.5, g_continuous=False)


def test_squared_copula_gaussian_is_a_copula():
    cop = gaussian(0.6)
    grid = np.linspace(0.0, 1.0, 6)
    for u in grid:
        assert squared_copula(cop, u, 1.0) == pytest.approx(u, abs=1e-9)
        assert squared_copula(cop, 1.0, u) == pytest.approx(u, abs=1e-9)
        assert squared_copula(cop, u, 0.0) == pytest.approx(0.0, abs=1e-12)


# ---------------------------------------------------------------------------
# reflection invariance of the variance closed forms
# ---------------------------------------------------------------------------

def test_sigma2_beta_reflection_invariant():
    for cop in (gaussian(0.6), clayton(2.0), frechet(0.5, 0.2, 0.3)):
        base = sigma2_beta(cop)
        for axes in ("u", "v", "uv"):
            assert sigma2_beta(cop.reflect(axes)) == pytest.approx(base,
                                                                   abs=1e-12)


def test_sigma2_frechet_reflection_invariant():
    # reflecting a Frechet mixture swaps the M and W weights
    w = FrechetWeights(0.5, 0.2, 0.3)
    w_reflected = FrechetWeights(0.3, 0.2, 0.5)
    for dist in (BERN, UNIF, NORM):
        assert sigma2_frechet(dist, w) == pytest.approx(
            sigma2_frechet(dist, w_reflected), abs=1e-15)


# ---------------------------------------------------------------------------
# closed-form dispatcher
# ---------------------------------------------------------------------------

def test_sigma2_closed_form_dispatch():
    assert sigma2_closed_form(NORM, comonotone()) == 2.0
    assert sigma2_closed_form(UNIF, independence()) == 1.0
    assert sigma2_closed_form(NORM, frechet(0.5, 0.0, 0.5)) == 3.0
    assert sigma2_closed_form(BERN, gaussian(0.5)) == pytest.approx(8.0 / 9.0)
    assert sigma2_closed_form(NORM, gaussian(0.5)) == pytest.approx(1.25)
    t5 = make_builtin("t", nu=5.0)
    assert sigma2_closed_form(t5, student_t(0.5, 5.0)) == pytest.approx(
        sigma2_nvm_from_var_x2(8.0, 0.5))
    assert sigma2_closed_form(UNIF, gaussian(0.5)) is None
    assert sigma2_closed_form(t5, student_t(0.5, 7.0)) is None
