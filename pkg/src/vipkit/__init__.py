"""Simulation and limit-setting toolkit for current-driven Pauli-exclusion tests.

Chain: injected current -> expected anomalous X-ray counts -> synthetic
current-on/off spectra -> subtraction -> upper limit on beta^2/2. A small
quon Fock-space module sits alongside.
"""
__version__ = "0.1.0"

from .physics import (
    Material,
    PhysicalConstants,
    StripGeometry,
    absorption_length,
    exact_escape_fraction,
    load_material,
    visible_fraction,
)
from .sensitivity import (
    DegenerateRunError,
    RunPlan,
    SensitivityReport,
    compare_scenarios,
    expected_anomalous,
    invert_bound,
    n_int,
    n_new,
)
from .transport import McConfig, McEstimate, simulate_escape, simulate_scatter_count
from .spectrum import (
    BackgroundModel,
    DetectorModel,
    ResidualSpectrum,
    Spectrum,
    normalize_subtract,
    roi_sum,
    synthesize_pair,
)
from .limits import (
    LimitResult,
    beta_bound,
    coverage_study,
    gaussian_roi_limit,
    poisson_upper_limit,
)
from .quon import CreationString, GramMatrix, exclusion_defect, gram_matrix, inner_product, min_eigenvalue
from .config import ConfigError, ScenarioConfig, bundled_scenario, load_config, parse_config
