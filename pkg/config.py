# RezQu Workbench Configuration
import math

TOOL_NAME = "rezqu-workbench"
TOOL_VERSION = "1.0.0"

# Integrator Settings
DEFAULT_DT_NS = 1e-3
MAX_DT_HALVINGS = 6
REFINEMENT_TOLERANCE = 1e-10  # final-state distance between successive halvings
NORM_TOLERANCE = 1e-9
UNITARITY_TOLERANCE = 1e-8
TRAJECTORY_SAMPLE_NS = 0.05  # spacing of exported trajectory rows

# Spectra Settings
LABEL_OVERLAP_THRESHOLD = 0.5
LABEL_ROUNDOFF = 1e-9  # exact 50/50 mixing must fail regardless of rounding
NEAR_DEGENERACY_FACTOR = 10.0  # detunings below this many couplings are flagged
MIDPOINT_SNAP = 1e-12  # relative, numerator of the fourth-order formula

# Quadrature Settings
QUADRATURE_ABS_TOL = 1e-12
PHASE_SPLIT = math.pi / 4
PHASE_SAMPLES_PER_NS = 200

# Error Budget Settings
IDLING_VALIDITY_LIMIT = 0.3  # |Omega_ZZ t| above which the quadratic form is flagged

# MOVE Design Settings
RAMP_SLOPE_GHZ_PER_NS = 0.5  # second front segment and rear ramp
MAX_FRONT_SLOPE_GHZ_PER_NS = 1.0
ERF_SIGMA_NS = 1.0
ERF_MARGIN_SIGMAS = 3.0
ROOT_TOLERANCE = 1e-10
ROOT_MAX_ITERATIONS = 60
FLAT_MAX_ITERATIONS = 50
FLAT_TOLERANCE = 1e-12
DESIGN_SWEEPS = 4  # alternations between front-ramp and flat-part solves
FRONT_CLEARANCE_COUPLINGS = 3.0  # intermediate front level at least this many g_m from the flat frequency
FRONT_ROOT_STARTS = 16  # Newton starts taken from the candidate grid
FRONT_ROOT_LIMIT = 3  # distinct admissible roots tried by the analytic design
SMALL_OVERSHOOT_LIMIT = 0.5  # |D / g_m|
SMALL_TAU_FRACTION = 0.2  # |tau| relative to pi / omega_R
MACHINE_ACCURACY_ERROR = 1e-10

OPTIMIZER = {
    'method': 'Nelder-Mead',
    'n_starts': 5,
    'perturbation': 0.05,
    'fatol': 1e-12,
    'xatol': 1e-9,
    'max_evaluations': 2000,
    'polish_evaluations': 400,
}

# Measurement Settings
EXCEPTIONAL_POINT_CONDITION = 1e12
LONG_TIME_GAMMAS = 10.0  # t >= 10 / Gamma counts as saturated
WEAK_COUPLING_FRACTION = 0.2  # g_m against min(|Delta_m|, Gamma)

# Devices (GHz, linear frequencies)
DEVICES = {
    'rezqu_25mhz': {
        'f_m_ghz': 7.0, 'f_b_ghz': 6.0, 'eta_ghz': 0.2,
        'g_m_ghz': 0.025, 'g_b_ghz': 0.025, 'include_gd': False,
    },
    'rezqu_50mhz': {
        'f_m_ghz': 7.0, 'f_b_ghz': 6.0, 'eta_ghz': 0.2,
        'g_m_ghz': 0.05, 'g_b_ghz': 0.05, 'include_gd': False,
    },
}

# MOVE setups
MOVE_PRESETS = {
    'piecewise_linear': {'f_q_start_ghz': 6.7, 'f_q_end_ghz': 6.5, 'family': 'piecewise-linear'},
    'erf': {'f_q_start_ghz': 6.7, 'f_q_end_ghz': 6.5, 'family': 'erf', 'sigma_ns': ERF_SIGMA_NS},
}

# Tunneling measurement
MEASUREMENT_PRESETS = {
    'phase_qubit': {
        'f_m_ghz': 7.0, 'f_q_ghz': 6.5, 'g_m_ghz': 0.025,
        'gamma_per_ns': 1.0, 't_meas_ns': 40.0,
    },
}

# Architecture estimates
ARCHITECTURE_PRESETS = {
    'typical': {'g_ghz': 0.025, 'eta_ghz': 0.2, 'detuning_ghz': 0.5, 'sweep_rate_ghz_per_ns': 0.5},
}

# Shipped experiment configs, by subcommand
DEFAULT_CONFIGS = {
    'spectrum': 'configs/spectrum.json',
    'idling-sweep': 'configs/idling_sweep.json',
    'move-analytic': 'configs/move_analytic.json',
    'move-optimize': 'configs/move_optimize.json',
    'tail-sweep': 'configs/tail_sweep.json',
    'lz-estimate': 'configs/lz_estimate.json',
    'measurement': 'configs/measurement.json',
    'error-budget': 'configs/error_budget.json',
}
