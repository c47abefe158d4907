import math

import numpy as np
import pytest

from statent.asymptotics import (
    FitResult,
    ScalingLaw,
    TooFewPoints,
    Unsupported,
    binomial_asymptote,
    fit_scaling,
    predicted_law,
    sun_r3_derivatives,
    tl_linear_coefficient,
    tl_sqrt_coefficient,
)
from statent.commutants import CommutantSpec, Family, sector_log_arrays
from statent.entanglement import log_negativity_logdomain
from statent.exactnum import DomainError, tl_q


def test_predicted_law_examples():
    law = predicted_law(Family.SUN, 2, "en")
    assert law.form == "log" and law.coefficient == 0.5
    assert law.offset == pytest.approx(math.log(math.sqrt(2 / math.pi)))
    law = predicted_law(Family.TL, 3, "sop")
    assert law.form == "sqrt"
    assert law.coefficient == pytest.approx(1.5358, abs=2e-4)
    law = predicted_law(Family.U1, 2, "en")
    assert law.form == "const" and law.coefficient == 0.0
    law = predicted_law(Family.SUN, 3, "r3")
    assert law.coefficient_range == (3.0, 4.0)
    law = predicted_law(Family.TL, 3, "rtilde", n=4.0)
    assert law.kind == "upper_bound" and law.coefficient == pytest.approx(0.75)
    with pytest.raises(Unsupported):
        predicted_law(Family.U1, 2, "rtilde")


def test_tl_linear_coefficient_values():
    assert tl_linear_coefficient(3, 1.0) == pytest.approx(0.1116, abs=5e-4)
    # vanishes toward n = 2
    vals = [tl_linear_coefficient(3, n) for n in (1.9, 1.99, 1.999)]
    assert vals[0] > vals[1] > vals[2] > 0
    assert vals[2] < 2e-3
    with pytest.raises(DomainError):
        tl_linear_coefficient(2, 1.0)
    with pytest.raises(DomainError):
        tl_linear_coefficient(3, 2.5)


def _ternary_max(f, lo, hi, iters=200):
    for _ in range(iters):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if f(m1) < f(m2):
            lo = m1
        else:
            hi = m2
    return (lo + hi) / 2


def test_tl_stationary_point_matches_numeric_maximum():
    from statent.asymptotics import _tl_a_max, _tl_c_at

    for N in (3, 4, 5):
        q = tl_q(N)
        for n in (0.5, 1.0, 1.5):
            a_num = _ternary_max(lambda a: _tl_c_at(N, n, a), 1e-9, 0.25 - 1e-9)
            assert abs(a_num - _tl_a_max(q, n)) < 1e-8


def test_tl_sqrt_coefficient():
    q = tl_q(3)
    assert tl_sqrt_coefficient(3) == pytest.approx(math.sqrt(8 / math.pi) * math.log(q))


def test_binomial_asymptote_accuracy():
    exact = math.lgamma(1025) - 2 * math.lgamma(513)
    approx = binomial_asymptote(512, 0).log_value()
    assert abs(approx - exact) / abs(exact) <= 1e-2
    d = binomial_asymptote(512, 0).log_value() - binomial_asymptote(512, 16).log_value()
    assert d == pytest.approx(16**2 / 512, abs=1e-12)
    with pytest.warns(UserWarning):
        binomial_asymptote(8, 0)


def test_fit_scaling_basics():
    pts = [(L, 3.0) for L in (8, 16, 32, 64, 128)]
    fit = fit_scaling(pts, "log")
    assert abs(fit.slope) <= 1e-12 and fit.intercept == pytest.approx(3.0)
    with pytest.raises(TooFewPoints):
        fit_scaling(pts[:3], "log")
    pts = [(L, 2.5 * math.log(L) - 1.0) for L in (8, 16, 32, 64)]
    fit = fit_scaling(pts, "log")
    assert fit.slope == pytest.approx(2.5, abs=1e-12)
    assert fit.residual == pytest.approx(0.0, abs=1e-12)


def test_su2_en_fit_slope():
    pts = []
    for k in range(6, 13):
        L = 2**k
        ls = sector_log_arrays(CommutantSpec(Family.SUN, 2, L, L // 2))
        pts.append((L, log_negativity_logdomain(ls)))
    fit = fit_scaling(pts, "log")
    assert abs(fit.slope - 0.5) <= 0.02


def test_tl3_en_linear_fit():
    pts = []
    for k in range(8, 13):
        L = 2**k
        ls = sector_log_arrays(CommutantSpec(Family.TL, 3, L, L // 2))
        pts.append((L, log_negativity_logdomain(ls)))
    fit = fit_scaling(pts, "linear")
    assert fit.slope >= 0.1116 - 0.005


def test_sun_r3_derivative_bracket_small():
    derivs = sun_r3_derivatives(3, 600, decades=1.0, points=6)
    lo, hi = 3.0, 4.0
    mids, ds = zip(*derivs)
    assert all(d <= hi + 0.1 for d in ds)
    gaps = [abs(d - lo) for d in ds]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))  # converging to lower edge
