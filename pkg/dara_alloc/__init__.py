# flake8: noqa
from .model import (Allocation, ProfileKind, RabConfig, RateVector, SensorSpec, WeightProfile,
                    rates_of_allocation, validate_allocation, validate_profile, validate_rab)
from .weights import (DeadlineHistogram, exponential_profile, fit_exponential, load_histogram,
                      profile_from_histogram, truncate_histogram)
from .rate_alloc import (Objective, achievable_budget, check_infinite_horizon_feasible,
                         feasibility_threshold, maxmin_rates, objective_value, target_rates,
                         weighted_utilities, weightedsum_rates)
from .policies import (DaraParams, PolicyTrace, dara_allocate, decomposition_allocate,
                       optimal_exhaustive, r_round_robin, rate_delay_shares, rd_round_robin,
                       round_robin)
from .metrics import UtilityReport, gap_bound, normalized_rates, unreachable_sensors, utility
from .experiment import (ExperimentConfig, ResultRow, normalize_objective, run_scenario,
                         summarize, sweep)
