import numpy as np
import pytest

from perifront import (BoundaryOp, CompetitionParams, InitialData,
                       bump_profile, check_condition_H1, constant_field,
                       cosine_profile, decay_field, tabulated_field,
                       time_modulated_field)
from perifront.errors import ConfigError, PreconditionError
from perifront.fields import ConditionA, TailSpec

from conftest import make_params


class TestBoundaryOp:
    def test_presets(self):
        d = BoundaryOp.dirichlet()
        n = BoundaryOp.neumann()
        assert d.is_dirichlet and not n.is_dirichlet
        assert d.alpha == 1.0 and n.beta == 1.0

    def test_weights_must_normalize(self):
        with pytest.raises(ConfigError):
            BoundaryOp(0.5, 0.2)

    def test_negative_weight_rejected(self):
        with pytest.raises(ConfigError):
            BoundaryOp(1.5, -0.5)


class TestPresets:
    def test_constant_is_flat(self):
        f = constant_field(2.0, 1.0)
        xs = np.linspace(0, 50, 7)
        assert np.allclose(f(0.3, xs), 2.0)
        assert f.tail is not None and f.tail.r == 0.0

    def test_nonpositive_constant_has_no_tail(self):
        assert constant_field(-1.0, 1.0).tail is None

    def test_time_modulation_periodicity(self):
        f = time_modulated_field(1.0, 0.5, period=2.0)
        x = np.array([0.0, 1.0])
        for t in (0.1, 0.7, 1.9):
            assert np.allclose(f(t, x), f(t + 2.0, x), atol=1e-14)

    def test_decay_field_sign_change(self):
        f = decay_field(kappa=0.5, coef=2.0)
        assert float(f(0.0, np.array([0.0]))[0]) > 0
        assert float(f(0.0, np.array([100.0]))[0]) < 0
        assert f.tail is None  # limit is negative

    def test_decay_field_positive_limit_tail(self):
        f = decay_field(kappa=-0.5, coef=1.0)
        assert f.tail is not None
        lo_min, _, _, up_max = f.tail.envelope_extrema(f.period)
        assert lo_min > 0 and up_max >= lo_min

    def test_tabulated_clamps_beyond_last_column(self):
        t_grid = np.array([0.0, 0.5])
        x_grid = np.array([0.0, 1.0, 2.0])
        vals = np.array([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]])
        f = tabulated_field(t_grid, x_grid, vals, period=1.0)
        assert float(f(0.0, np.array([10.0]))[0]) == 3.0

    def test_tabulated_shape_mismatch(self):
        with pytest.raises(ConfigError):
            tabulated_field(np.array([0.0]), np.array([0.0, 1.0]),
                            np.zeros((2, 2)), period=1.0)

    def test_negative_time_rejected(self):
        f = constant_field(1.0, 1.0)
        with pytest.raises(PreconditionError):
            f(-0.1, np.array([0.0]))


class TestTailSpec:
    def test_exponent_range(self):
        with pytest.raises(ConfigError):
            TailSpec(r=-2.5, lower=lambda t: 1.0, upper=lambda t: 1.0,
                     condition_a=ConditionA(0.5, 2.0))

    def test_condition_a_windows_unbounded(self):
        ca = ConditionA(varsigma=0.5, m=2.0, x0=1.0)
        lo0, hi0 = ca.window(0)
        lo5, hi5 = ca.window(5)
        assert hi0 == 2.0 * lo0
        assert lo5 == 32.0

    def test_envelope_order_enforced(self):
        ts = TailSpec(r=0.0, lower=lambda t: 2.0, upper=lambda t: 1.0,
                      condition_a=ConditionA(0.5, 2.0))
        with pytest.raises(ConfigError):
            ts.envelope_extrema(1.0)


class TestParams:
    def test_positive_requirements(self):
        with pytest.raises(ConfigError):
            make_params(d1=0.0)
        with pytest.raises(ConfigError):
            make_params(mu=-1.0)

    def test_rates_nonnegative(self):
        with pytest.raises(ConfigError):
            make_params(k=-0.1)


class TestInitialData:
    def test_bump_is_compatible_with_dirichlet(self):
        p = make_params()
        init = InitialData(u0=bump_profile(0.5, 4.0),
                           v0=bump_profile(0.5, 4.0), spec={})
        init.validate(p.s0, p.bc1, p.bc2)

    def test_bump_rejected_under_neumann(self):
        p = make_params(bc1=BoundaryOp.neumann(), bc2=BoundaryOp.neumann())
        init = InitialData(u0=bump_profile(0.5, 4.0),
                           v0=bump_profile(0.5, 4.0), spec={})
        with pytest.raises(ConfigError):
            init.validate(p.s0, p.bc1, p.bc2)

    def test_cosine_is_compatible_with_neumann(self):
        p = make_params(bc1=BoundaryOp.neumann(), bc2=BoundaryOp.neumann())
        init = InitialData(u0=cosine_profile(0.5, 4.0),
                           v0=cosine_profile(0.5, 4.0), spec={})
        init.validate(p.s0, p.bc1, p.bc2)

    def test_must_vanish_at_front(self):
        p = make_params()
        init = InitialData(u0=lambda x: np.full_like(np.asarray(x, float), 0.5),
                           v0=bump_profile(0.5, 4.0), spec={})
        with pytest.raises(ConfigError):
            init.validate(p.s0, p.bc1, p.bc2)

    def test_single_needs_positive_native_everywhere(self):
        p = make_params()
        init = InitialData(u0=bump_profile(0.5, 4.0),
                           v0=bump_profile(0.5, 4.0), spec={})
        with pytest.raises(ConfigError):
            init.validate(p.s0, p.bc1, p.bc2, problem="single")


class TestConditionH1:
    def test_holds_for_weak_competition(self):
        a = constant_field(1.0, 1.0)
        b = constant_field(1.0, 1.0)
        assert check_condition_H1(a, b, make_params()).holds

    def test_fails_for_strong_competition(self):
        a = constant_field(1.0, 1.0)
        b = constant_field(1.0, 1.0)
        v = check_condition_H1(a, b, make_params(k=2.0, h=2.0))
        assert v.verdict == "fails"

    def test_undecidable_without_tail(self):
        a = constant_field(1.0, 1.0)
        b = decay_field(kappa=0.5, coef=2.0)  # no tail
        v = check_condition_H1(a, b, make_params())
        assert v.verdict == "undecidable"
