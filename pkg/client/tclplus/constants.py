# Config files older or newer than this are rejected
SCHEMA_VERSION = 1

HERMITICITY_TOL = 1e-10
BATH_STATE_TOL = 1e-12

# Largest joint Hilbert dimension for which superoperators are materialized
MAX_DENSE_JOINT_DIM = 64
BRUTE_FORCE_MAX_SITES = 12

DEFAULT_STEPS_PER_UNIT = 400
TAYLOR_STENCIL_SPACING = 1e-2
TAYLOR_STENCIL_POINTS = 5

# |det(I - Sigma)| below this marks TCL breakdown
BREAKDOWN_DET_THRESHOLD = 1e-12

CSV_FLOAT_FORMAT = ".17g"

MIN_FIT_SAMPLES = 10
SWEEP_MIN_FIT_SAMPLES = 3
NOISE_FLOOR_FACTOR = 64.0

SQRT2_MINUS_1 = 2 ** 0.5 - 1
