import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import ndtri
from scipy.stats import kstest, multivariate_normal

from rankvar import (CapabilityError, ConstraintError, ContractError,
                     ParseError, ShuffleSpec, bvn_cdf, clayton, comonotone,
                     counter_monotone, frechet, gaussian, independence,
                     parse_copula, sample_csv, shuffle_of_m, student_t)

N = 50_000
KS_LIMIT = 1.95  # max-deviation threshold is KS_LIMIT / sqrt(n)


# ---------------------------------------------------------------------------
# structure of the fundamental samplers
# ---------------------------------------------------------------------------

def test_comonotone_samples_on_diagonal():
    pts = comonotone().sample(2000, 1)
    assert np.array_equal(pts[:, 0], pts[:, 1])


def test_counter_monotone_samples_on_antidiagonal():
    pts = counter_monotone().sample(2000, 1)
    assert np.array_equal(pts[:, 1], 1.0 - pts[:, 0])


def test_sampling_is_reproducible_and_open():
    cop = clayton(2.0)
    a = cop.sample(5000, 99)
    b = cop.sample(5000, 99)
    assert np.array_equal(a, b)
    assert a.min() > 0.0 and a.max() < 1.0


@pytest.mark.parametrize("cop", [
    independence(),
    gaussian(0.6),
    student_t(0.5, 5.0),
    clayton(2.0),
    clayton(-0.7),
    frechet(0.3, 0.5, 0.2),
    shuffle_of_m(ShuffleSpec.equal_strips((2, 1, 4, 3))),
    gaussian(0.4).reflect("u"),
])
def test_marginals_are_uniform(cop):
    pts = cop.sample(N, 424242)
    for j in (0, 1):
        assert kstest(pts[:, j], "uniform").statistic < KS_LIMIT / math.sqrt(N)


# ---------------------------------------------------------------------------
# CDF values and bounds
# ---------------------------------------------------------------------------

def test_cdf_closed_forms():
    assert independence().cdf(0.3, 0.7) == pytest.approx(0.21, abs=1e-15)
    assert frechet(0.5, 0.0, 0.5).cdf(0.5, 0.5) == pytest.approx(0.25, abs=1e-15)
    # Archimedean closed form: (4 + 4 - 1)^(-1/2)
    assert clayton(2.0).cdf(0.5, 0.5) == pytest.approx(
        0.3779644730092272, abs=1e-15)


@pytest.mark.parametrize("cop", [
    independence(), comonotone(), counter_monotone(), gaussian(0.7),
    gaussian(-0.95), clayton(3.0), clayton(-0.6), frechet(0.2, 0.3, 0.5),
    shuffle_of_m(ShuffleSpec.equal_strips((3, 1, 2))),
    clayton(2.0).reflect("v"),
])
def test_cdf_within_frechet_hoeffding_bounds(cop):
    grid = np.linspace(0.0, 1.0, 21)
    for u in grid:
        for v in grid:
            c = cop.cdf(u, v)
            assert max(u + v - 1.0, 0.0) - 1e-12 <= c <= min(u, v) + 1e-12


@given(st.floats(0, 1), st.floats(0, 1))
def test_gaussian_cdf_bounds_property(u, v):
    c = gaussian(0.8).cdf(u, v)
    assert max(u + v - 1.0, 0.0) - 1e-9 <= c <= min(u, v) + 1e-9


def test_bvn_against_scipy_oracle():
    rng = np.random.default_rng(5)
    for rho in (-0.95, -0.5, 0.0, 0.3, 0.9, 0.99):
        mvn = multivariate_normal(mean=[0, 0], cov=[[1, rho], [rho, 1]])
        pts = rng.normal(size=(50, 2)) * 1.5
        ours = bvn_cdf(pts[:, 0], pts[:, 1], rho)
        assert np.max(np.abs(ours - mvn.cdf(pts))) < 1e-7


def test_gaussian_cdf_center_identity():
    for rho in (-0.9, -0.3, 0.2, 0.75, 0.95):
        want = 0.25 + math.asin(rho) / (2.0 * math.pi)
        assert gaussian(rho).cdf(0.5, 0.5) == pytest.approx(want, abs=1e-12)


def test_empirical_cdf_matches_analytic_at_center():
    for cop in (gaussian(0.5), clayton(2.0), frechet(0.4, 0.4, 0.2)):
        pts = cop.sample(N, 7)
        emp = np.mean((pts[:, 0] <= 0.5) & (pts[:, 1] <= 0.5))
        p = cop.cdf(0.5, 0.5)
        assert abs(emp - p) <= 3.0 * math.sqrt(p * (1 - p) / N)


# ---------------------------------------------------------------------------
# rectangle volumes
# ---------------------------------------------------------------------------

def test_rectangle_volume_examples():
    assert independence().rectangle_volume(0, 0.5, 0, 0.5) == pytest.approx(0.25)
    assert comonotone().rectangle_volume(0, 0.5, 0.5, 1) == 0.0
    assert counter_monotone().rectangle_volume(0, 0.5, 0.5, 1) == pytest.approx(0.5)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_rectangle_volume_nonnegative(a, b, c, d):
    u1, u2 = sorted((a, b))
    v1, v2 = sorted((c, d))
    assert clayton(-0.5).rectangle_volume(u1, u2, v1, v2) >= 0.0


def test_rectangle_volume_rejects_bad_rectangles():
    with pytest.raises(ContractError):
        independence().rectangle_volume(0.7, 0.3, 0.0, 1.0)


# ---------------------------------------------------------------------------
# balance / survival at the center
# ---------------------------------------------------------------------------

def test_p_balance_examples():
    assert independence().p_balance() == pytest.approx(0.5)
    assert comonotone().p_balance() == pytest.approx(1.0)
    # 2 * (1/4 + asin(1/2)/(2 pi)) = 2/3
    assert gaussian(0.5).p_balance() == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert student_t(0.5, 7.0).p_balance() == pytest.approx(2.0 / 3.0, abs=1e-15)


def test_survival_at_center_equals_half_balance():
    for cop in (independence(), gaussian(-0.4), clayton(1.5)):
        assert cop.survival_at_center() == pytest.approx(cop.p_balance() / 2.0)


# ---------------------------------------------------------------------------
# reflections
# ---------------------------------------------------------------------------

def test_reflect_comonotone_gives_counter_monotone_law():
    pts = comonotone().reflect("u").sample(1000, 3)
    assert np.allclose(pts[:, 0] + pts[:, 1], 1.0)


def test_reflect_independence_cdf_unchanged():
    refl = independence().reflect("v")
    for u, v in ((0.3, 0.7), (0.5, 0.5), (0.9, 0.1)):
        assert refl.cdf(u, v) == pytest.approx(u * v, abs=1e-15)


def test_reflect_gaussian_flips_dependence_sign():
    # Pearson correlation of the normal scores recovers the parameter
    pts = gaussian(0.5).reflect("u").sample(N, 11)
    corr = np.corrcoef(ndtri(pts[:, 0]), ndtri(pts[:, 1]))[0, 1]
    assert abs(corr - (-0.5)) <= 3.0 / math.sqrt(N)


def test_double_reflection_restores_the_law():
    base = clayton(2.0)
    roundtrip = base.reflect("u").reflect("u")
    a = base.sample(N, 21)
    b = roundtrip.sample(N, 22)  # different stream, same law
    edges = np.linspace(0.0, 1.0, 11)
    ha = np.histogram2d(a[:, 0], a[:, 1], bins=(edges, edges))[0]
    hb = np.histogram2d(b[:, 0], b[:, 1], bins=(edges, edges))[0]
    stat = np.sum((ha - hb) ** 2 / np.maximum(ha + hb, 1.0))
    # chi-square with 99 dof, 99.9% quantile
    assert stat < 148.23
    assert np.allclose(roundtrip.cdf(0.3, 0.8), base.cdf(0.3, 0.8), atol=1e-12)


def test_reflect_rejects_unknown_axes():
    with pytest.raises(ContractError):
        independence().reflect("w")


# ---------------------------------------------------------------------------
# family-specific behavior
# ---------------------------------------------------------------------------

def test_frechet_category_frequencies():
    pm, ppi, pw = 0.3, 0.5, 0.2
    pts = frechet(pm, ppi, pw).sample(N, 13)
    on_diag = np.abs(pts[:, 0] - pts[:, 1]) < 1e-12
    on_anti = np.abs(pts[:, 0] + pts[:, 1] - 1.0) < 1e-12
    for share, want in ((on_diag.mean(), pm), (on_anti.mean(), pw),
                        ((~on_diag & ~on_anti).mean(), ppi)):
        assert abs(share - want) <= 3.0 * math.sqrt(want * (1 - want) / N)


def test_frechet_weights_validated():
    with pytest.raises(ConstraintError):
        frechet(0.5, 0.5, 0.5)
    with pytest.raises(ConstraintError):
        frechet(-0.1, 0.6, 0.5)


def test_gaussian_degenerate_correlations():
    pts = gaussian(1.0).sample(1000, 5)
    assert np.array_equal(pts[:, 0], pts[:, 1])
    pts = gaussian(-1.0).sample(1000, 5)
    assert np.array_equal(pts[:, 1], 1.0 - pts[:, 0])
    with pytest.raises(ContractError):
        gaussian(1.5)


def test_clayton_limits():
    assert np.array_equal(clayton(-1.0).sample(500, 8),
                          counter_monotone().sample(500, 8))
    tiny = clayton(1e-12)
    assert tiny.cdf(0.3, 0.7) == pytest.approx(0.21, abs=1e-15)
    pts = tiny.sample(N, 9)
    assert abs(np.corrcoef(pts[:, 0], pts[:, 1])[0, 1]) <= 3.0 / math.sqrt(N)
    with pytest.raises(ContractError):
        clayton(-1.2)


def test_clayton_sampler_matches_cdf_negative_theta():
    cop = clayton(-0.7)
    pts = cop.sample(N, 31)
    for u, v in ((0.3, 0.6), (0.5, 0.5), (0.8, 0.2)):
        want = cop.cdf(u, v)
        emp = np.mean((pts[:, 0] <= u) & (pts[:, 1] <= v))
        assert abs(emp - want) <= 3.0 * math.sqrt(want * (1 - want) / N) + 1e-3


def test_student_t_cdf_unavailable():
    cop = student_t(0.5, 5.0)
    assert not cop.cdf_available
    with pytest.raises(CapabilityError):
        cop.cdf(0.5, 0.5)
    with pytest.raises(CapabilityError):
        cop.rectangle_volume(0.0, 0.5, 0.0, 0.5)


# ---------------------------------------------------------------------------
# shuffles
# ---------------------------------------------------------------------------

def test_shuffle_balance_examples():
    quarters = (2, 1, 4, 3)
    assert shuffle_of_m(ShuffleSpec.equal_strips(quarters)).p_balance() == 1.0
    assert shuffle_of_m(ShuffleSpec.equal_strips((3, 4, 1, 2))).p_balance() == 0.0
    assert shuffle_of_m(
        ShuffleSpec.equal_strips((2, 4, 1, 3))).p_balance() == pytest.approx(0.5)


@pytest.mark.parametrize("flips", [(1, 1, 1, 1), (-1, -1, -1, -1), (1, -1, 1, -1)])
def test_shuffle_cdf_matches_empirical(flips):
    cop = shuffle_of_m(ShuffleSpec.equal_strips((2, 4, 1, 3), flips))
    pts = cop.sample(N, 17)
    for u, v in ((0.3, 0.6), (0.25, 0.75), (0.5, 0.5), (0.85, 0.15)):
        emp = np.mean((pts[:, 0] <= u) & (pts[:, 1] <= v))
        assert abs(emp - cop.cdf(u, v)) <= 3.0 * 0.5 / math.sqrt(N) + 1e-3


def test_shuffle_spec_validation():
    with pytest.raises(ConstraintError):
        ShuffleSpec(n=2, breakpoints=(0.0, 0.4, 1.0), permutation=(2, 1),
                    flips=(1, 1))  # widths differ from their images
    with pytest.raises(ConstraintError):
        ShuffleSpec(n=2, breakpoints=(0.0, 0.5, 1.0), permutation=(1, 1),
                    flips=(1, 1))
    with pytest.raises(ConstraintError):
        ShuffleSpec(n=2, breakpoints=(0.0, 0.5, 0.9), permutation=(2, 1),
                    flips=(1, 1))
    # unequal widths are fine when the permutation preserves them
    ShuffleSpec(n=3, breakpoints=(0.0, 0.2, 0.8, 1.0), permutation=(1, 2, 3),
                flips=(1, -1, 1))


def test_sample_csv_round_trip():
    text = sample_csv(gaussian(0.5), 50, 9)
    lines = text.strip().splitlines()
    assert lines[0] == "u,v"
    parsed = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    assert np.array_equal(parsed, gaussian(0.5).sample(50, 9))


# ---------------------------------------------------------------------------
# config strings
# ---------------------------------------------------------------------------

def test_parse_copula_forms():
    assert parse_copula("M").family == "M"
    assert parse_copula("pi").family == "Pi"
    assert parse_copula("frechet:0.3,0.5,0.2").cdf(1.0, 0.5) == pytest.approx(0.5)
    assert parse_copula("gauss:0.5").rho == 0.5
    cop = parse_copula("t:0.3,5")
    assert cop.rho == 0.3 and cop.nu == 5.0
    assert parse_copula("clayton:2").theta == 2.0
    assert parse_copula("shuffle:4:2,1,4,3:1,1,1,1").p_balance() == 1.0


@pytest.mark.parametrize("bad", [
    "gumbel:2", "gauss:2.0", "frechet:0.5,0.5", "shuffle:3:2,1,4,3:1,1,1,1",
    "clayton:-2", "t:0.5", "",
])
def test_parse_copula_errors(bad):
    with pytest.raises((ParseError, ContractError)):
        parse_copula(bad)
