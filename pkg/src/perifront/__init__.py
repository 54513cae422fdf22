"""Numerical laboratory for two-species competition with free boundaries.

Simulates Stefan-type moving-front invasions in time-periodic environments,
computes the periodic-parabolic principal eigenvalues and critical lengths
that decide spreading versus vanishing, constructs extremal periodic
coexistence states by monotone iteration, certifies vanishing via explicit
supersolutions, and brackets the asymptotic front speed with periodic
semi-waves.
"""

__version__ = "0.1.0"

from .errors import (BracketError, CFLViolationError, ConfigError,
                     IntegrityError, NoThresholdError, NonConvergenceError,
                     ParameterError, PerifrontError, PreconditionError,
                     SingularSystemError, TruncationError)
from .fields import (BoundaryOp, CompetitionParams, InitialData,
                     PeriodicField, bump_profile, check_condition_H1,
                     constant_field, cosine_profile, decay_field,
                     tabulated_field, time_modulated_field)
from .parabolic import Grid1D, Profile
from .profiles import PeriodicProfile
from .eigen import (EigenResult, critical_length, principal_eigenvalue,
                    threshold_s_star)
from .periodic import (ExtremalStates, OdeBoundSet, PeriodicScalarOde,
                       monotone_iteration, ode_bound_set,
                       periodic_logistic_halfline, periodic_logistic_ode,
                       periodic_logistic_pde)
from .freeboundary import (FrontTrajectory, Resolution, VanishingCertificate,
                           build_vanishing_certificate, simulate_coupled,
                           simulate_single)
from .dynamics import (ConvergenceReport, CriticalMuResult, DichotomyReport,
                       classify, convergence_to_periodic, critical_mu)
from .speed import (MeasuredSpeed, SemiWave, SpeedBounds, measured_speed,
                    semiwave_profile, solve_F0, speed_bounds)
from .config import Scenario, load_scenario, save_scenario, scenario_from_dict
