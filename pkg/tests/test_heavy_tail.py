import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tailnet.heavy_tail import (
    ParetoLaw,
    ProfileError,
    TailProfile,
    ThresholdSequence,
    chi_upper_bound,
    pareto_quantile,
    row_cap,
    row_caps,
    theoretical_exceedance,
    threshold_u,
)


@pytest.mark.parametrize(
    "p, k, expected",
    [(0.5, 1.0, 2.0), (0.75, 2.0, 2.0)],
)
def test_pareto_quantile_hand_values(p, k, expected):
    assert pareto_quantile(p, ParetoLaw(k)) == pytest.approx(expected, rel=1e-15)


def test_pareto_quantile_left_endpoint_is_scale():
    for law in (ParetoLaw(1.0), ParetoLaw(3.5, 2.0), ParetoLaw(0.7, 0.1)):
        assert pareto_quantile(0.0, law) == law.scale


@pytest.mark.parametrize("p", [1.0, -0.1, 1.5])
def test_pareto_quantile_rejects_out_of_range(p):
    with pytest.raises(ValueError):
        pareto_quantile(p, ParetoLaw(1.0))


@given(
    p=st.floats(0.0, 0.999999),
    k=st.floats(0.2, 10.0),
    scale=st.floats(0.1, 10.0),
)
def test_quantile_inverts_cdf(p, k, scale):
    law = ParetoLaw(k, scale)
    x = pareto_quantile(p, law)
    assert x >= scale
    assert law.cdf(x) == pytest.approx(p, abs=1e-9)


@given(x=st.floats(1.0, 1e6), k=st.floats(0.2, 10.0))
def test_survival_is_power_law(x, k):
    assert ParetoLaw(k).survival(x) == pytest.approx(x ** (-k), rel=1e-12)


def test_pareto_law_rejects_bad_parameters():
    with pytest.raises(ValueError):
        ParetoLaw(0.0)
    with pytest.raises(ValueError):
        ParetoLaw(1.0, -1.0)


@pytest.mark.parametrize(
    "n, y, k1, expected",
    [(1, 2.0, 1.5, 2.0), (16, 1.0, 2.0, 4.0), (1000, 1.0, 1.0, 1000.0)],
)
def test_threshold_u(n, y, k1, expected):
    assert threshold_u(n, ThresholdSequence(y, k1)) == pytest.approx(expected, rel=1e-14)


def test_threshold_sequence_validates():
    with pytest.raises(ValueError):
        ThresholdSequence(0.0, 1.0)
    with pytest.raises(ValueError):
        ThresholdSequence(1.0, -2.0)


def test_chi_upper_bound_values():
    assert chi_upper_bound(1, 3) == 0.5
    assert chi_upper_bound(2, 4) == pytest.approx(0.2, rel=1e-15)


def test_chi_upper_bound_vanishes_near_k1():
    for eps in (1e-2, 1e-4, 1e-6):
        assert chi_upper_bound(1.0, 1.0 + eps) == pytest.approx(eps / 2, rel=2 * eps)


def test_chi_upper_bound_requires_k_above_k1():
    with pytest.raises(ProfileError):
        chi_upper_bound(2.0, 2.0)
    with pytest.raises(ProfileError):
        chi_upper_bound(2.0, 1.0)


def test_chi_upper_bound_without_lighter_columns():
    assert chi_upper_bound(2.0, math.inf) == 0.5


@pytest.mark.parametrize("n, chi, expected", [(100, 0.5, 10), (1, 0.3, 1), (1, 0.9, 1), (1000, 0.3, 7)])
def test_row_cap(n, chi, expected):
    assert row_cap(n, chi) == expected


def test_row_cap_oracle_against_float_power():
    # independent oracle: exact integer comparison m**(1/chi) <= n
    for n in range(1, 3000, 7):
        for chi in (0.2, 0.25, 0.5):
            m = row_cap(n, chi)
            inv = round(1 / chi)
            assert m**inv <= n < (m + 1) ** inv


def test_row_caps_vector_matches_scalar():
    caps = row_caps(50, 0.4)
    assert caps.tolist() == [row_cap(i, 0.4) for i in range(1, 51)]


def test_row_cap_rejects_chi_beyond_bound():
    with pytest.raises(ValueError):
        row_cap(100, 0.6, chi0=0.5)


@pytest.mark.parametrize(
    "z1, y, k1, n, expected",
    [(1.0, 1.0, 1.0, 100, 0.01), (2.0, 1.0, 2.0, 100, 0.04)],
)
def test_theoretical_exceedance(z1, y, k1, n, expected):
    assert theoretical_exceedance(z1, y, k1, n) == pytest.approx(expected, rel=1e-14)


@given(y=st.floats(0.1, 10.0), k1=st.floats(0.3, 5.0), n=st.integers(1, 10**6))
def test_theoretical_exceedance_ratio_one(y, k1, n):
    assert theoretical_exceedance(y, y, k1, n) == pytest.approx(1.0 / n, rel=1e-12)


def test_tail_profile_fields():
    prof = TailProfile(((1.0, 0.3), (1.0, 0.7), (3.0, 1.0), (2.5, 1.0)))
    assert prof.k1 == 1.0
    assert prof.k == 2.5
    assert prof.dominating == (0, 1)
    assert prof.d == 2
    assert prof.thetas == (0.3, 0.7, 1.0, 1.0)
    assert prof.n_columns == 4


def test_tail_profile_without_lighter_columns():
    prof = TailProfile(((2.0, 0.5),))
    assert prof.k == math.inf


@pytest.mark.parametrize("cols", [(), ((0.0, 0.5),), ((1.0, 1.5),), ((1.0, -0.1),)])
def test_tail_profile_rejects_invalid(cols):
    with pytest.raises(ProfileError):
        TailProfile(cols)
