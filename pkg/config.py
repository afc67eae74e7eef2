import os
from dotenv import load_dotenv

load_dotenv()

class Config:
    RESULTS_FOLDER = os.getenv('HHK_RESULTS_FOLDER', os.path.join(os.path.dirname(os.path.abspath(__file__)), 'results'))
    LOG_DIR = os.getenv('HHK_LOG_DIR', 'logs')
    LOG_LEVEL = os.getenv('HHK_LOG_LEVEL', 'INFO')

    # Worker cap for scans (env var HHK_THREADS)
    HHK_THREADS = max(1, int(os.getenv('HHK_THREADS', str(os.cpu_count() or 1))))

    # The counterexample parameter, kept as the exact literal
    DEFAULT_T = os.getenv('HHK_DEFAULT_T', '1/12')
    DEFAULT_SEED = int(os.getenv('HHK_SEED', '0'))

    # Scan defaults
    DEFAULT_N = 512
    DEFAULT_MARGIN = 1e-3
    MIN_SCAN_N = 16
    VIOLATION_CAP = 100
    T_SCAN_VALUES = tuple(round(0.02 * k, 2) for k in range(1, 11))

    # Certification defaults
    DEFAULT_DEPTH = 24
    DEFAULT_BUDGET = 5_000_000
    MAX_DEPTH = 40
    CURVATURE_CERT_MARGIN = 1e-2

    # Verification presets
    QUICK_N = 128
    # certificate depth cap matches the full run; only the scans are coarser
    QUICK_DEPTH = 24
    QUICK_BUDGET = 2_000_000
    FULL_N = 512
    FULL_DEPTH = 24
    FULL_BUDGET = 5_000_000
    SINGULAR_SAMPLES = 200
    THEOREM1_POINTS = 20

    # Tolerances
    SINGULAR_SET_TOLERANCE = float(os.getenv('HHK_SINGULAR_SET_TOLERANCE', '1e-3'))
    CUSP_NORMAL_TOLERANCE = 1e-10
    CROSSCAP_TOLERANCE = 1e-12
    ALEXANDROV_SLACK = 0.01

    OUTPUT_FORMATS = {'csv', 'json', 'obj'}
    MESH_SURFACES = {'mm', 'crosscap', 'basegraph'}

class DevelopmentConfig(Config):
    LOG_LEVEL = 'DEBUG'

class ProductionConfig(Config):
    LOG_LEVEL = 'WARNING'

class TestingConfig(Config):
    HHK_THREADS = 1
    QUICK_N = 48
    SINGULAR_SAMPLES = 40
    THEOREM1_POINTS = 6
