import cmath
import math

import numpy as np
import pytest

from conftest import additive_eval_brute, spec_eval_brute, trial_big_omega, trial_omega
from selberg_delange.errors import DegenerateSpecError, DomainError
from selberg_delange.exact import (
    DistributionTable,
    WeightTable,
    additive_value_table,
    build_weight_table,
    compensated_complex_sum,
    compensated_cumsum,
    compensated_sum,
    distribution_to_csv,
    mgf_exact,
    mod_poisson_residual,
    multiplicative_value_table,
    partial_sum,
    pmf,
    sample,
    sums_to_csv,
    twisted_sum,
)
from selberg_delange.funcs import (
    BIG_OMEGA,
    OMEGA,
    AdditiveSpec,
    GrowthBound,
    MultiplicativeSpec,
    euler_phi_over_n,
    geometric_B,
    tabulated_additive,
    tabulated_multiplicative,
    tau_rho,
    theta_omega,
    unit,
)
from selberg_delange.sieve import build_sieve

SIEVE = build_sieve(10**4)


# ---------------------------------------------------------------------------
# compensated summation


def test_compensated_sum_same_sign_is_fsum_accurate():
    # nonnegative data (the weight-table case) carries no cancellation;
    # the blocked sum then agrees with fsum to the last few ulps
    rng = np.random.default_rng(1)
    data = rng.random(50000) * 10.0 ** rng.integers(-6, 6, size=50000)
    want = math.fsum(data.tolist())
    assert compensated_sum(data) == pytest.approx(want, rel=1e-15)


@pytest.mark.parametrize("size", [0, 1, 1023, 1024, 1025, 4096 + 17])
def test_compensated_sum_error_scales_with_l1_norm(size):
    # signed data: the contract is |error| <= ~1e-14 * sum|values|,
    # which is what keeps per-bucket pmf errors near 1e-12 at x = 1e7
    rng = np.random.default_rng(size + 1)
    data = rng.standard_normal(size) * 10.0 ** rng.integers(-8, 8, size=size)
    want = math.fsum(data.tolist())
    budget = 1e-14 * float(np.abs(data).sum()) + 1e-300
    assert abs(compensated_sum(data) - want) <= budget


def test_compensated_complex_sum():
    rng = np.random.default_rng(42)
    data = rng.standard_normal(3000) + 1j * rng.standard_normal(3000)
    got = compensated_complex_sum(data)
    assert got.real == pytest.approx(math.fsum(data.real.tolist()), abs=1e-12)
    assert got.imag == pytest.approx(math.fsum(data.imag.tolist()), abs=1e-12)


def test_compensated_cumsum_prefixes():
    rng = np.random.default_rng(7)
    data = rng.standard_normal(3000) * 10.0 ** rng.integers(-6, 10, size=3000)
    cum = compensated_cumsum(data)
    assert cum.shape == data.shape
    for idx in (0, 1, 511, 1024, 2047, 2999):
        assert cum[idx] == pytest.approx(math.fsum(data[: idx + 1].tolist()), rel=1e-14, abs=1e-8)


# ---------------------------------------------------------------------------
# value tables


@pytest.mark.parametrize(
    "spec",
    [
        unit(),
        theta_omega(2.5),
        theta_omega(0.5 + 1.5j),
        geometric_B(1.5),
        tau_rho(0.5),
        euler_phi_over_n(),
        tabulated_multiplicative({(2, 1): 0.0, (3, 1): 2.0}, default=1.0),
    ],
    ids=lambda s: s.name,
)
def test_multiplicative_value_table_matches_brute(spec):
    table = multiplicative_value_table(spec, 1000, SIEVE)
    assert table[0] == 0
    assert table[1] == 1
    for n in range(1, 1001):
        want = spec_eval_brute(spec, n)
        assert table[n] == pytest.approx(want, rel=1e-12, abs=1e-15)


def test_multiplicative_value_table_dtypes():
    assert multiplicative_value_table(unit(), 100).dtype == np.float64
    assert multiplicative_value_table(theta_omega(1j), 100).dtype == np.complex128


def test_multiplicative_value_table_rejects_non_finite():
    bad = MultiplicativeSpec(
        "bad", lambda p, k: math.inf, rho=1.0, c0=0.25, growth=GrowthBound(1.0, 1.0)
    )
    with pytest.raises(ValueError):
        multiplicative_value_table(bad, 100)


def test_additive_value_table_matches_trial_division():
    om = additive_value_table(OMEGA, 2000, SIEVE)
    big = additive_value_table(BIG_OMEGA, 2000, SIEVE)
    assert om.dtype == np.int64
    assert big.dtype == np.int64
    for n in range(1, 2001):
        assert om[n] == trial_omega(n)
        assert big[n] == trial_big_omega(n)


def test_additive_value_table_fractional_values():
    g = tabulated_additive({(2, 1): 0.5, (3, 2): 1.25})
    table = additive_value_table(g, 100)
    assert table.dtype == np.float64
    for n in range(1, 101):
        assert table[n] == pytest.approx(additive_eval_brute(g, n), abs=1e-15)


def test_additive_value_table_rejects_bad_specs():
    complex_g = AdditiveSpec("cplx", lambda p, k: 1j, integer_valued=False)
    with pytest.raises(ValueError):
        additive_value_table(complex_g, 50)
    lying = AdditiveSpec("lying", lambda p, k: 0.5, integer_valued=True)
    with pytest.raises(ValueError):
        additive_value_table(lying, 50)


# ---------------------------------------------------------------------------
# weight tables


def test_build_weight_table_unit():
    table = build_weight_table(unit(), 100, SIEVE)
    assert isinstance(table, WeightTable)
    assert table.total == pytest.approx(100.0, rel=1e-14)
    assert table.cumulative[1] == 1.0
    diffs = np.diff(table.cumulative)
    assert (diffs >= 0).all()


def test_build_weight_table_rejects_negative():
    with pytest.raises(ValueError) as exc_info:
        build_weight_table(theta_omega(-1), 50, SIEVE)
    assert "alpha(2)" in str(exc_info.value)


def test_build_weight_table_rejects_complex():
    with pytest.raises(ValueError):
        build_weight_table(theta_omega(1j), 50, SIEVE)


def test_build_weight_table_rejects_vanishing_total():
    with pytest.raises(DegenerateSpecError):
        build_weight_table(unit(), 10, values=np.zeros(11))


# ---------------------------------------------------------------------------
# exact sums


def test_partial_sum_enumeration_examples():
    # sum over n <= 10 of 2^omega(n): 1+2+2+2+2+4+2+2+2+4
    assert partial_sum(theta_omega(2), 10, SIEVE) == pytest.approx(23.0, rel=1e-14)
    assert partial_sum(unit(), 50, SIEVE) == pytest.approx(50.0, rel=1e-14)


@pytest.mark.parametrize(
    "spec",
    [theta_omega(2), geometric_B(1.5), euler_phi_over_n(), theta_omega(0.5 + 1.5j)],
    ids=lambda s: s.name,
)
def test_partial_sum_matches_brute_force(spec):
    for x in (1, 7, 30, 50):
        want_re = math.fsum(spec_eval_brute(spec, n).real for n in range(1, x + 1))
        want_im = math.fsum(spec_eval_brute(spec, n).imag for n in range(1, x + 1))
        got = partial_sum(spec, x, SIEVE)
        assert got == pytest.approx(complex(want_re, want_im), rel=1e-13, abs=1e-13)


def test_partial_sum_validation():
    with pytest.raises(ValueError):
        partial_sum(unit(), 0)
    with pytest.raises(ValueError):
        partial_sum(unit(), 100, values=np.ones(50))


def test_twisted_sum_enumeration_example():
    # sum over n <= 4 of 0.5^Omega(n) = 1 + 0.5 + 0.5 + 0.25
    got = twisted_sum(unit(), 0.5, BIG_OMEGA, 4, SIEVE)
    assert got == pytest.approx(2.25, rel=1e-14)


def test_twisted_sum_matches_brute_force():
    for y in (2.0, 0.5, -1.0, complex(0.3, 0.8)):
        want = 0j
        for n in range(1, 41):
            want += y ** trial_omega(n) * spec_eval_brute(theta_omega(1.5), n)
        got = twisted_sum(theta_omega(1.5), y, OMEGA, 40, SIEVE)
        assert got == pytest.approx(want, rel=1e-12)


def test_twisted_sum_negative_base_integer_g():
    # (-1)^Omega(n) is the Liouville function; its partial sums are exact
    got = twisted_sum(unit(), -1.0, BIG_OMEGA, 20, SIEVE)
    want = sum((-1) ** trial_big_omega(n) for n in range(1, 21))
    assert got == pytest.approx(want, rel=1e-14)


def test_twisted_sum_branch_cut_for_fractional_g():
    g = tabulated_additive({(2, 1): 0.5})
    with pytest.raises(DomainError):
        twisted_sum(unit(), -2.0, g, 20, SIEVE)
    # positive base is fine
    got = twisted_sum(unit(), 2.0, g, 4, SIEVE)
    want = 1.0 + 2.0**0.5 + 1.0 + 1.0
    assert got == pytest.approx(want, rel=1e-13)


def test_twisted_sum_rejects_zero_y():
    with pytest.raises(ValueError):
        twisted_sum(unit(), 0.0, OMEGA, 10, SIEVE)


def test_mgf_exact_examples():
    assert mgf_exact(unit(), OMEGA, 10, math.log(2.0), SIEVE) == pytest.approx(2.3, rel=1e-14)
    assert mgf_exact(unit(), OMEGA, 100, 0.0, SIEVE) == pytest.approx(1.0, rel=1e-14)


# ---------------------------------------------------------------------------
# pmf


def test_pmf_small_example():
    dist = pmf(unit(), OMEGA, 10, SIEVE)
    assert dist.values.tolist() == [0, 1, 2]
    assert dist.probabilities.tolist() == pytest.approx([0.1, 0.7, 0.2], abs=1e-15)
    assert dist.mean == pytest.approx(1.1, abs=1e-14)
    assert dist.variance == pytest.approx(0.29, abs=1e-14)
    assert dist.as_dict() == pytest.approx({0: 0.1, 1: 0.7, 2: 0.2})


def test_pmf_tail_probability():
    dist = pmf(unit(), OMEGA, 10, SIEVE)
    assert dist.tail_probability(2) == pytest.approx(0.2, abs=1e-15)
    assert dist.tail_probability(1.5) == pytest.approx(0.2, abs=1e-15)
    assert dist.tail_probability(0) == pytest.approx(1.0, abs=1e-15)
    assert dist.tail_probability(5) == 0.0
    assert dist.tail_probability(-3) == 1.0


def test_pmf_invariants_at_scale():
    x = 10**5
    for spec, g in ((unit(), OMEGA), (theta_omega(2.5), BIG_OMEGA)):
        dist = pmf(spec, g, x)
        assert math.fsum(dist.probabilities.tolist()) == pytest.approx(1.0, abs=1e-12)
        assert (dist.probabilities > 0).all()
        assert np.all(np.diff(dist.values) > 0)
        mean = math.fsum((dist.values * dist.probabilities).tolist())
        assert dist.mean == pytest.approx(mean, rel=1e-13)


def test_pmf_rejects_non_integer_or_negative_g():
    frac = tabulated_additive({(2, 1): 0.5})
    with pytest.raises(ValueError):
        pmf(unit(), frac, 100, SIEVE)
    signed = tabulated_additive({(2, 1): -1.0})
    with pytest.raises(ValueError):
        pmf(unit(), signed, 100, SIEVE)


def test_mgf_pmf_duality():
    # E[e^{z g}] computed directly and through the pmf agree to near
    # machine precision; the two paths share no summation code
    x = 10**4
    for spec in (unit(), theta_omega(2.5)):
        weights = multiplicative_value_table(spec, x)
        dist = pmf(spec, OMEGA, x, weights=weights)
        for z in (math.log(0.5), math.log(2.0), complex(0.3, 1.0)):
            direct = mgf_exact(spec, OMEGA, x, z, weights=weights)
            via_pmf = sum(
                cmath.exp(z * m) * q
                for m, q in zip(dist.values.tolist(), dist.probabilities.tolist())
            )
            assert abs(direct - via_pmf) < 1e-12


# ---------------------------------------------------------------------------
# sampling


def test_sample_deterministic_golden():
    draws = sample(unit(), 10, seed=7, count=5)
    assert draws.tolist() == [9, 3, 5, 5, 1]


def test_sample_reproducible_and_stream_independent():
    a = sample(unit(), 10**4, seed=123, count=1000)
    b = sample(unit(), 10**4, seed=123, count=1000)
    c = sample(unit(), 10**4, seed=123, count=1000, stream=1)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert a.min() >= 1 and a.max() <= 10**4


def test_sample_degenerate_support():
    assert sample(unit(), 1, seed=99, count=5).tolist() == [1, 1, 1, 1, 1]
    assert sample(unit(), 10, seed=1, count=0).size == 0
    with pytest.raises(ValueError):
        sample(unit(), 10, seed=1, count=-1)


def test_sample_empirical_frequencies():
    # theta_omega(2) doubles the weight per distinct prime; compare the
    # empirical mean of omega(N) to the exact pmf mean within 4 sigma
    x = 10**4
    spec = theta_omega(2)
    dist = pmf(spec, OMEGA, x)
    draws = sample(spec, x, seed=2024, count=200000)
    om = additive_value_table(OMEGA, x, SIEVE)
    empirical = float(np.mean(om[draws]))
    sigma = math.sqrt(dist.variance / draws.size)
    assert abs(empirical - dist.mean) < 4.0 * sigma


# ---------------------------------------------------------------------------
# normalized residual


def test_mod_poisson_residual_at_zero_is_one():
    assert mod_poisson_residual(unit(), OMEGA, 1000, 0.0, sieve=SIEVE) == 1.0
    assert mod_poisson_residual(unit(), OMEGA, 3, 0.0) == 1.0


def test_mod_poisson_residual_rejects_tiny_x():
    with pytest.raises(ValueError):
        mod_poisson_residual(unit(), OMEGA, 2, 0.5)


def test_mod_poisson_residual_manual_composition():
    x, z = 5000, complex(0.2, 0.4)
    got = mod_poisson_residual(unit(), OMEGA, x, z, sieve=SIEVE)
    t_x = math.log(math.log(x))
    want = cmath.exp(-t_x * (cmath.exp(z) - 1.0)) * mgf_exact(unit(), OMEGA, x, z, SIEVE)
    assert got == pytest.approx(want, rel=1e-12)


def test_mod_poisson_residual_rho_override():
    x, z = 5000, 0.3
    got = mod_poisson_residual(unit(), OMEGA, x, z, rho=0.0, sieve=SIEVE)
    assert got == pytest.approx(mgf_exact(unit(), OMEGA, x, z, SIEVE), rel=1e-13)


# ---------------------------------------------------------------------------
# exporters


def test_distribution_to_csv():
    dist = pmf(unit(), OMEGA, 10, SIEVE)
    assert distribution_to_csv(dist) == "value,probability\n0,0.1\n1,0.7\n2,0.2\n"


def test_sums_to_csv():
    rows = [(10, complex(23.0, 0.0)), (100, complex(1.5, -2.25))]
    assert sums_to_csv(rows) == "x,sum_re,sum_im\n10,23,0\n100,1.5,-2.25\n"
