"""
Constants and configuration values for the hoising simulator
Values are loaded from config file with fallback defaults
"""
import os
from fractions import Fraction
try:
    import tomllib
except ImportError:
    import tomli as tomllib

# Load config file
PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEFAULT_CONFIG_PATH = os.path.join(PROJECT_ROOT, 'config', 'settings.toml')
CONFIG_PATH = os.environ.get('HOISING_CONFIG', DEFAULT_CONFIG_PATH)


def _load_config(path: str = CONFIG_PATH) -> dict:
    """Load configuration from TOML file"""
    try:
        with open(path, 'rb') as f:
            return tomllib.load(f)
    except Exception:
        return {}


_config = _load_config()

# ADAM Configuration (from config with fallbacks)
_adam = _config.get('adam', {})
ADAM_LR = float(_adam.get('lr', 0.05))
ADAM_BETA1 = float(_adam.get('beta1', 0.9))
ADAM_BETA2 = float(_adam.get('beta2', 0.999))
ADAM_EPSILON = float(_adam.get('epsilon', 1e-8))
ADAM_STEPS = int(_adam.get('steps', 500))

# Moreau-envelope estimator (alpha = delta = t = 1, 1000 samples, lr = 1, 10000 steps)
_moreau = _config.get('moreau', {})
MOREAU_T = float(_moreau.get('t', 1.0))
MOREAU_ALPHA = float(_moreau.get('alpha', 1.0))
MOREAU_DELTA = float(_moreau.get('delta', 1.0))
MOREAU_SAMPLES = int(_moreau.get('samples', 1000))
MOREAU_LR = float(_moreau.get('lr', 1.0))
MOREAU_STEPS = int(_moreau.get('steps', 10000))

# Two-point estimator
_two_point = _config.get('two_point', {})
TWO_POINT_DELTA = float(_two_point.get('delta', 1e-3))

# Relaxation
_relaxation = _config.get('relaxation', {})
DEFAULT_P = float(_relaxation.get('p', 1.0))

# Parity learning with error
_ple = _config.get('ple', {})
PLE_ERROR_RATE = Fraction(str(_ple.get('error_rate', '1/2')))
PLE_SUBSET_DENSITY = float(_ple.get('subset_density', 0.5))
PLE_SIZES = [int(n) for n in _ple.get('sizes', [8, 16, 32, 64])]

# Benchmarks
_bench = _config.get('bench', {})
MOREAU_MAX_N = int(_bench.get('moreau_max_n', 8))
BENCH_INSTANCES = int(_bench.get('instances', 20))
BENCH_TRIALS = int(_bench.get('trials', 50))

# Fourier compilation
_fourier = _config.get('fourier', {})
TRUTH_TABLE_MAX_ARITY = int(_fourier.get('truth_table_max_arity', 16))

# Runtime (environment wins over config)
_runtime = _config.get('runtime', {})
JOBS_ENV_VAR = 'HOISING_JOBS'
LOG_LEVEL_ENV_VAR = 'HOISING_LOG_LEVEL'
DEFAULT_JOBS = int(os.environ.get(JOBS_ENV_VAR, _runtime.get('jobs', 1)))
DEFAULT_LOG_LEVEL = os.environ.get(LOG_LEVEL_ENV_VAR, _runtime.get('log_level', 'INFO'))

# Truth convention: -1 is true, +1 is false
SPIN_TRUE = -1
SPIN_FALSE = 1

# Formula text format
FORMULA_HEADER_TAG = 'hybrid'
TAG_XOR = 'xor'
TAG_CARD = 'card'
TAG_CLAUSE = 'cnf'
TAG_WEIGHT = 'w'
TAG_COMMENT = 'c'
TAG_PROBLEM = 'p'

# Exit codes
EXIT_SUCCESS = 0
EXIT_ALL_FAILED = 1
EXIT_INPUT_ERROR = 2

# CSV schemas (column order is part of the schema)
TRACE_SCHEMA = ('hoising-trace', 1)
TRACE_COLUMNS = ['step', 'a1', 'a2', 'objective', 'grad1', 'grad2']

SUCCESS_SCHEMA = ('hoising-success', 1)
SUCCESS_COLUMNS = [
    'relaxation',
    'gradient',
    'step',
    'pooled_rate',
    'median_rate',
    'q1_rate',
    'q3_rate',
    'iqr',
]

STATS_SCHEMA = ('hoising-stats', 1)
STATS_COLUMNS = [
    'n',
    'num_spins',
    'num_edges',
    'fourier_terms',
    'max_arity',
]

BENCH_COLUMNS = ['n'] + SUCCESS_COLUMNS
