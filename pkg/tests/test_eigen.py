import warnings

import numpy as np
import pytest

from perifront import (BoundaryOp, constant_field, critical_length,
                       principal_eigenvalue, threshold_s_star,
                       time_modulated_field)
from perifront.eigen import ConditionAWarning
from perifront.errors import BracketError, NoThresholdError
from perifront.fields import PeriodicField

from conftest import make_params

DIR = BoundaryOp.dirichlet()
NEU = BoundaryOp.neumann()
ZERO = constant_field(0.0, 1.0)
RES = (128, 128)


class TestPrincipalEigenvalue:
    def test_dirichlet_laplacian(self):
        res = principal_eigenvalue(np.pi, 1.0, ZERO, DIR, resolution=RES)
        assert abs(res.lambda1 - 1.0) < 1e-3
        assert res.converged

    def test_neumann_quarter_wave(self):
        res = principal_eigenvalue(np.pi / 2, 1.0, ZERO, NEU, resolution=RES)
        assert abs(res.lambda1 - 1.0) < 1e-3

    def test_constant_shift(self):
        lam0 = principal_eigenvalue(np.pi, 1.0, ZERO, DIR, resolution=RES).lambda1
        lam1 = principal_eigenvalue(np.pi, 1.0, constant_field(1.0, 1.0), DIR,
                                    resolution=RES).lambda1
        assert abs(lam1 - (lam0 - 1.0)) < 1e-4

    def test_mean_zero_modulation_is_gauge(self):
        # a purely temporal, mean-zero coefficient does not move lambda1
        osc = PeriodicField(1.0, lambda t, x: np.full_like(
            x, np.sin(2 * np.pi * t)), name="osc")
        lam0 = principal_eigenvalue(np.pi, 1.0, ZERO, DIR, resolution=RES).lambda1
        lam = principal_eigenvalue(np.pi, 1.0, osc, DIR, resolution=RES).lambda1
        assert abs(lam - lam0) < 1e-4

    def test_eigenfunction_positive_and_periodic(self):
        res = principal_eigenvalue(np.pi, 1.0, ZERO, DIR, resolution=RES)
        ef = res.eigenfunction
        assert ef is not None
        assert np.all(ef.values[:, 1:-1] > 0)
        assert float(np.max(np.abs(ef.values[-1] - ef.values[0]))) < 1e-4

    def test_small_domain_blowup(self):
        # lambda1 scales like (pi/ell)^2: gigantic on a tiny interval
        res = principal_eigenvalue(1e-2, 1.0, ZERO, DIR,
                                   resolution=(32, 5120), strict=False)
        assert res.lambda1 > 100.0

    def test_monotone_in_length(self):
        lams = [principal_eigenvalue(ell, 1.0, ZERO, DIR,
                                     resolution=RES).lambda1
                for ell in (1.0, 2.0, 4.0)]
        assert lams[0] > lams[1] > lams[2]


class TestCriticalLength:
    def test_unit_coefficient_pi(self):
        ell0 = critical_length(1.0, constant_field(1.0, 1.0), DIR,
                               bracket=(2.0, 4.0))
        assert abs(ell0 - np.pi) / np.pi < 1e-3

    def test_bad_bracket(self):
        with pytest.raises(BracketError):
            critical_length(1.0, constant_field(1.0, 1.0), DIR,
                            bracket=(4.0, 6.0))

    def test_no_threshold_for_negative_field(self):
        with pytest.raises(NoThresholdError):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ConditionAWarning)
                critical_length(1.0, constant_field(-1.0, 1.0), DIR,
                                resolution=(64, 64))

    def test_warns_without_tail_metadata(self):
        osc = PeriodicField(1.0, lambda t, x: np.full_like(x, 1.0),
                            name="bare")
        with pytest.warns(ConditionAWarning):
            critical_length(1.0, osc, DIR, bracket=(2.0, 4.0),
                            resolution=(64, 64))


class TestThreshold:
    def test_coupled_picks_minimum_branch(self):
        a = constant_field(1.0, 1.0)
        b = constant_field(1.0, 1.0)
        p = make_params(d2=4.0)  # v-branch critical length is 2*pi
        res = threshold_s_star(a, b, p, problem="coupled",
                               resolution=(64, 64))
        assert res.branch == "u-branch"
        assert abs(res.s_star - np.pi) / np.pi < 5e-3
        assert res.v_length is not None and res.v_length > res.u_length

    def test_single_ignores_native_species(self):
        a = constant_field(1.0, 1.0)
        b = constant_field(-1.0, 1.0)  # would have no crossing
        res = threshold_s_star(a, b, make_params(), problem="single",
                               resolution=(64, 64))
        assert res.v_length is None
        assert abs(res.s_star - np.pi) / np.pi < 5e-3
