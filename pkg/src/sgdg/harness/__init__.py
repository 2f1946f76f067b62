"""Case setup, time loop, norms, output files and the command line."""

from sgdg.harness.cases import CASE_NAMES, CaseConfig, builtin_case, load_config
from sgdg.harness.norms import ErrorReport, error_norms, observed_orders

__all__ = ["CASE_NAMES", "CaseConfig", "builtin_case", "load_config", "ErrorReport",
           "error_norms", "observed_orders"]
