import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from survbond.bond import Bond
from survbond.curves import DiscountCurve, HazardCurve
from survbond.exceptions import CalibrationError, DomainError
from survbond.pricer import (
    PricingInputs,
    bcds,
    calibrate_flat_hazard,
    calibrate_oasf,
    conventional_spread_approx,
    conventional_spread_exact,
    price_continuous,
    price_exact,
    price_naive_continuous,
    riskless_price,
    rpv01,
    yield_and_modified_duration,
    z_spread,
)

import oracles

FLAT4 = DiscountCurve.flat(0.04)
NO_DEFAULT = HazardCurve.flat(0.0)
BOND5 = Bond(0.05, 2, 5.0, 0.4, 0.0)


def inputs(bond=BOND5, r=0.04, h=0.0, oasf=0.0):
    return PricingInputs(bond, DiscountCurve.flat(r), HazardCurve.flat(h), oasf)


class TestPriceExact:
    def test_riskless_collapses_to_discounted_sum(self):
        expected = sum(0.025 * math.exp(-0.04 * 0.5 * i) for i in range(1, 11)) + math.exp(-0.2)
        assert price_exact(inputs()) == pytest.approx(expected, rel=1e-14)
        assert price_exact(inputs()) == pytest.approx(riskless_price(BOND5, FLAT4), rel=1e-14)

    def test_five_percent_five_year_value(self):
        # oracle value from the loop above, continuous 4% forwards
        assert price_exact(inputs()) == pytest.approx(1.0430589990, abs=1e-9)

    def test_semiannual_equivalent_forward(self):
        # 4% compounded semiannually is a flat forward of 2 ln(1.02)
        p = price_exact(inputs(r=2.0 * math.log(1.02)))
        assert p == pytest.approx(1.044912925, abs=1e-9)

    def test_immediate_default_recovers_principal_fraction(self):
        bond = Bond(0.0, 2, 5.0, 0.4, 0.0)
        assert price_exact(inputs(bond, r=0.0, h=200.0)) == pytest.approx(0.4, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(
        coupon=st.floats(0.0, 0.12),
        freq=st.sampled_from([1, 2, 4]),
        T=st.floats(0.3, 30.0),
        R=st.floats(0.0, 0.9),
        r1=st.floats(0.0, 0.1),
        r2=st.floats(0.0, 0.1),
        h1=st.floats(0.0, 0.4),
        h2=st.floats(0.0, 0.4),
        t_node=st.floats(0.2, 20.0),
        oasf=st.floats(-0.02, 0.03),
    )
    def test_matches_loop_oracle(self, coupon, freq, T, R, r1, r2, h1, h2, t_node, oasf):
        r_nodes = [(t_node, r1), (t_node + 3.0, r2)]
        h_nodes = [(t_node + 1.0, h1), (t_node + 5.0, h2)]
        bond = Bond(coupon, freq, T, R, 0.0)
        got = price_exact(PricingInputs(bond, DiscountCurve(r_nodes), HazardCurve(h_nodes), oasf))
        want = oracles.discrete_price(coupon, freq, T, R, r_nodes, h_nodes, oasf)
        assert got == pytest.approx(want, rel=1e-9)


class TestPriceContinuous:
    def test_zero_coupon_has_no_corrections(self):
        bond = Bond(0.0, 2, 7.0, 0.4, 0.0)
        i = PricingInputs(bond, FLAT4, HazardCurve.flat(0.03))
        a, hw, term = oracles.continuous_pieces([(0, 0.04)], [(0, 0.03)], 7.0)
        assert price_continuous(i) == pytest.approx(term + 0.4 * hw, rel=1e-12)
        assert price_continuous(i) == price_naive_continuous(i)

    def test_riskless_gap_is_early_discount_bias(self):
        i = inputs()
        gap = price_naive_continuous(i) - price_continuous(i)
        assert gap == pytest.approx(0.0125 * (1.0 - math.exp(-0.2)), rel=1e-12)
        assert abs(price_continuous(i) - price_exact(i)) < 1e-4

    def test_close_to_exact_for_moderate_credit(self):
        i = inputs(h=0.02)
        assert abs(price_continuous(i) - price_exact(i)) * 100 < 0.3

    @settings(max_examples=40, deadline=None)
    @given(
        coupon=st.floats(0.0, 0.12),
        T=st.floats(0.5, 30.0),
        R=st.floats(0.0, 0.9),
        Rc=st.floats(0.0, 1.0),
        r1=st.floats(-0.01, 0.1),
        h1=st.floats(0.0, 0.5),
        h2=st.floats(0.0, 0.5),
        t_node=st.floats(0.1, 20.0),
        oasf=st.floats(-0.02, 0.03),
    )
    def test_matches_quadrature(self, coupon, T, R, Rc, r1, h1, h2, t_node, oasf):
        r_nodes = [(t_node, r1), (t_node + 2.0, 0.05)]
        h_nodes = [(t_node * 0.5, h1), (t_node + 4.0, h2)]
        bond = Bond(coupon, 2, T, R, Rc)
        i = PricingInputs(bond, DiscountCurve(r_nodes), HazardCurve(h_nodes), oasf)
        want = oracles.continuous_price(coupon, 2, T, R, Rc, r_nodes, h_nodes, oasf)
        assert price_continuous(i) == pytest.approx(want, rel=1e-10, abs=1e-12)


class TestNaive:
    @pytest.mark.parametrize("coupon", [0.01, 0.05, 0.12])
    @pytest.mark.parametrize("h", [0.0, 0.05, 0.3])
    def test_naive_above_corrected(self, coupon, h):
        i = inputs(Bond(coupon, 2, 10.0, 0.4, 0.0), r=0.03, h=h)
        assert price_naive_continuous(i) >= price_continuous(i)

    def test_naive_overestimates_exact(self):
        i = inputs(Bond(0.08, 2, 10.0, 0.4, 0.0), r=0.05, h=0.03)
        assert price_naive_continuous(i) - price_exact(i) > 0.0


class TestRPV01:
    def test_zero_maturity(self):
        assert rpv01(FLAT4, HazardCurve.flat(0.1), 0.0) == 0.0

    def test_flat_closed_form(self):
        got = rpv01(FLAT4, HazardCurve.flat(0.06), 5.0)
        assert got == pytest.approx((1 - math.exp(-0.5)) / 0.10, rel=1e-14)
        assert got == pytest.approx(3.93469, abs=1e-5)

    def test_undiscounted(self):
        assert rpv01(DiscountCurve.flat(0.0), NO_DEFAULT, 6.5) == pytest.approx(6.5, rel=1e-15)

    def test_negative_maturity(self):
        with pytest.raises(DomainError):
            rpv01(FLAT4, NO_DEFAULT, -1.0)


class TestBCDS:
    @pytest.mark.parametrize("h", [0.001, 0.02, 0.3])
    @pytest.mark.parametrize("r", [0.0, 0.04, 0.1])
    def test_credit_triangle_for_flat_curves(self, h, r):
        got = bcds(DiscountCurve.flat(r), HazardCurve.flat(h), 7.0, 0.4, 0.0015)
        assert got == pytest.approx(h * 0.6 + 0.0015, abs=1e-14)

    def test_no_default(self):
        assert bcds(FLAT4, NO_DEFAULT, 5.0, 0.4, 0.002) == 0.002

    def test_term_structure_against_riemann(self):
        h_nodes = [(2.0, 0.01), (10.0, 0.03)]
        got = bcds(FLAT4, HazardCurve(h_nodes), 5.0, 0.4)
        want = oracles.bcds_riemann([(0.0, 0.04)], h_nodes, 5.0, 0.4, dt=1e-4)
        assert 0.006 < got < 0.018
        assert got == pytest.approx(want, rel=1e-7)

    def test_zero_maturity(self):
        with pytest.raises(DomainError):
            bcds(FLAT4, NO_DEFAULT, 0.0, 0.4)


class TestCalibration:
    HAZ = HazardCurve([(3.0, 0.01), (8.0, 0.03)])

    def test_oasf_fixed_point(self):
        p = price_exact(PricingInputs(BOND5, FLAT4, self.HAZ))
        assert calibrate_oasf(BOND5, FLAT4, self.HAZ, p) == pytest.approx(0.0, abs=1e-12)

    def test_oasf_round_trip(self):
        p = price_exact(PricingInputs(BOND5, FLAT4, self.HAZ, 0.0123))
        oasf = calibrate_oasf(BOND5, FLAT4, self.HAZ, p)
        assert oasf == pytest.approx(0.0123, abs=1e-8)
        assert price_exact(PricingInputs(BOND5, FLAT4, self.HAZ, oasf)) == pytest.approx(p, abs=1e-10)

    def test_oasf_unattainable(self):
        with pytest.raises(CalibrationError) as err:
            calibrate_oasf(BOND5, FLAT4, self.HAZ, 50.0)
        assert err.value.bracket == (-0.5, 5.0)
        assert "[-0.5, 5.0]" in str(err.value)

    def test_flat_hazard_riskless(self):
        p = riskless_price(BOND5, FLAT4)
        assert calibrate_flat_hazard(BOND5, FLAT4, p) == pytest.approx(0.0, abs=1e-12)

    def test_flat_hazard_round_trip(self):
        p = price_exact(inputs(h=0.08))
        h = calibrate_flat_hazard(BOND5, FLAT4, p)
        assert h == pytest.approx(0.08, abs=1e-10)

    def test_flat_hazard_recovery_override(self):
        p = price_exact(inputs(Bond(0.05, 2, 5.0, 0.2, 0.0), h=0.05))
        assert calibrate_flat_hazard(BOND5, FLAT4, p, recovery=0.2) == pytest.approx(0.05, abs=1e-10)

    def test_below_recovery_floor(self):
        with pytest.raises(CalibrationError):
            calibrate_flat_hazard(BOND5, FLAT4, 0.3)


class TestConventionalSpread:
    def test_no_default(self):
        assert conventional_spread_exact(0.06, 0.04, 0.0, 0.4, 5.0) == pytest.approx(0.0, abs=1e-12)

    def test_zero_recovery_equals_hazard(self):
        assert conventional_spread_exact(0.06, 0.04, 0.02, 0.0, 5.0) == pytest.approx(0.02, abs=1e-12)

    def test_against_bisection(self):
        C, r, h, R, T = 0.06, 0.04, 0.02, 0.4, 5.0
        target = oracles.flat_survival(C, r, h, R, T)
        want = oracles.bisect(lambda s: oracles.flat_strippable(C, r + s, T) - target, -1.0, 10.0)
        got = conventional_spread_exact(C, r, h, R, T)
        assert got == pytest.approx(want, abs=1e-12)
        assert got == pytest.approx(0.012, abs=5e-4)

    def test_approx_value(self):
        assert conventional_spread_approx(0.06, 0.04, 0.02, 0.4, 5.0) == pytest.approx(0.01216, abs=1e-15)

    def test_approx_par_coupon(self):
        r, h, R = 0.03, 0.04, 0.35
        par = r + h * (1 - R)
        assert conventional_spread_approx(par, r, h, R, 9.0) == pytest.approx(h * (1 - R), abs=1e-16)

    def test_approx_no_default(self):
        assert conventional_spread_approx(0.07, 0.03, 0.0, 0.4, 5.0) == 0.0

    def test_approx_error_quadratic_in_maturity(self):
        C, r, h, R = 0.08, 0.04, 0.02, 0.4
        ratios = []
        for T in (2.0, 1.0, 0.5, 0.25):
            err = abs(conventional_spread_approx(C, r, h, R, T) - conventional_spread_exact(C, r, h, R, T))
            ratios.append(err / (h * T * T))
        assert max(ratios) < 2.0 * min(ratios)
        assert max(ratios) < 0.05

    def test_bad_maturity(self):
        with pytest.raises(DomainError):
            conventional_spread_exact(0.05, 0.04, 0.02, 0.4, 0.0)


class TestConventionalMeasures:
    def test_par_yield(self):
        y, _ = yield_and_modified_duration(Bond(0.065, 2, 10.0), 1.0)
        assert y == pytest.approx(0.065, abs=1e-12)

    def test_zero_coupon_duration(self):
        y, mod = yield_and_modified_duration(Bond(0.0, 2, 5.0), 0.8)
        assert mod == pytest.approx(5.0 / (1 + y / 2), rel=1e-12)

    def test_kft_625_modified_duration(self):
        _, mod = yield_and_modified_duration(Bond(0.0625, 2, 7.92), 1.049)
        assert mod == pytest.approx(6.34, abs=0.15)

    def test_z_spread_zero_for_riskless_price(self):
        assert z_spread(BOND5, FLAT4, riskless_price(BOND5, FLAT4)) == pytest.approx(0.0, abs=1e-12)

    def test_z_spread_round_trip(self):
        curve = DiscountCurve([(1.0, 0.02), (4.0, 0.035), (10.0, 0.045)])
        p = riskless_price(BOND5, curve, 0.0064)
        assert z_spread(BOND5, curve, p) == pytest.approx(0.0064, abs=1e-10)

    def test_z_spread_distressed(self):
        bond = Bond(0.05, 2, 10.0)
        s = z_spread(bond, FLAT4, 0.40)
        want = oracles.bisect(lambda x: riskless_price(bond, FLAT4, x) - 0.40, -0.5, 10.0)
        assert s > 0.12
        assert s == pytest.approx(want, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(
    coupon=st.floats(0.0, 0.12),
    T=st.floats(1.0, 30.0),
    r=st.floats(0.0, 0.1),
    h=st.floats(0.0, 0.5),
    x=st.floats(0.0, 0.05),
    dx=st.floats(1e-4, 0.05),
)
def test_price_decreasing_in_oasf_and_rate(coupon, T, r, h, x, dx):
    bond = Bond(coupon, 2, T, 0.4, 0.0)
    lo = price_exact(PricingInputs(bond, DiscountCurve.flat(r), HazardCurve.flat(h), x))
    hi = price_exact(PricingInputs(bond, DiscountCurve.flat(r), HazardCurve.flat(h), x + dx))
    assert hi < lo
    up = price_exact(PricingInputs(bond, DiscountCurve.flat(r + dx), HazardCurve.flat(h), x))
    assert up < lo


@settings(max_examples=30, deadline=None)
@given(coupon=st.floats(0.0, 0.12), T=st.floats(1.0, 30.0), h=st.floats(0.0, 0.3), dh=st.floats(1e-3, 0.3))
def test_price_decreasing_in_moderate_hazard(coupon, T, h, dh):
    bond = Bond(coupon, 2, T, 0.4, 0.0)
    p0 = price_exact(inputs(bond, h=h))
    p1 = price_exact(inputs(bond, h=h + dh))
    # long zero-coupon bonds can gain from early recovery
    assume(p1 > 0.5)
    assert p1 < p0


def test_continuous_double_counts_lost_coupon_without_discounting():
    """At zero rates the two coupon corrections coincide in size.

    The early-discount term then already removes the coupon lost on default,
    and the error against the discrete sum is close to ``-(C/2f)(1 - Q(T))``.
    This pins down where the approximation is weakest.
    """
    bond = Bond(0.12, 2, 30.0, 0.4, 0.0)
    i = inputs(bond, r=0.0, h=0.2)
    err = price_continuous(i) - price_exact(i)
    assert err == pytest.approx(-0.03 * (1 - math.exp(-6.0)), rel=0.05)
