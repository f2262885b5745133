"""Constants for the h3bound package."""

import math

DOMAIN = "h3bound"

# Thin-triangles constant of H^3; every downstream constant takes it as a parameter.
DEFAULT_DELTA = math.log(1.0 + math.sqrt(2.0))

# Tolerances, one decade of slack per composition layer
TOL_CONSTRUCTION = 1e-12
TOL_IDENTITY = 1e-10

# Ball coordinates must stay this far inside the unit sphere
BALL_EDGE_TOL = 1e-15

# Half-width of the "boundary" band of the horoball membership test
HOROBALL_BAND = 1e-12

# Unit tangent check used by exp_map
UNIT_TOL = 1e-10

# Geodesic-120 joints
BEND_ANGLE = 2.0 * math.pi / 3.0

# Largest argument of cosh/sinh that stays finite in double precision
MAX_HYPERBOLIC_ARGUMENT = 709.0

# Segment parameters beyond this are not sampled by the distance search
SEGMENT_SEARCH_CAP = 600.0

# Bound schedule
LOG_DOMAIN_THRESHOLD = 1e300
STRICT_EPS = 1e-9  # realizes "L1 > 2(delta + Delta)"
LBAR_BISECT_TOL = 1e-9
LBAR_MAX_DOUBLINGS = 2000

# Steiner optimizer
DEGENERATE_EDGE_TOL = 1e-7
DEFAULT_OPTIMIZE_TOL = 1e-9
DEFAULT_MAX_ITERATIONS = 5000
ARMIJO_C = 1e-4
ARMIJO_SHRINK = 0.5
REPORT_ANGLE_TOL_DEG = 0.5
OPTIMIZE_STALL_TOL = 1e-6  # residual accepted when length can no longer resolve a decrease
REPAIR_SPLIT_DISTANCE = 1e-3

# Graph enumeration stays at desk scale
MIN_RANK = 2
MAX_ENUM_RANK = 5
MAX_ORACLE_RANK = 3

# Rendering
SVG_SAMPLES_PER_EDGE = 64
SVG_RENDER_RADIUS = 30.0  # hyperbolic length drawn along very long edges
SVG_PLANES = ("xy", "xz", "yz")

# Verification suites
SUITE_THIN_TRIANGLES = "thin-triangles"
SUITE_SELECTION = "selection"
SUITE_SHORTCUT = "shortcut"
SUITE_TRICHOTOMY = "trichotomy"
SUITE_STEINER = "steiner"
SUITE_WINDOW = "window"
SUITE_METRIC = "metric"
SUITES = [
    SUITE_THIN_TRIANGLES,
    SUITE_SELECTION,
    SUITE_SHORTCUT,
    SUITE_TRICHOTOMY,
    SUITE_STEINER,
    SUITE_WINDOW,
    SUITE_METRIC,
]

# Default trial counts per suite
DEFAULT_TRIALS = {
    SUITE_THIN_TRIANGLES: 100_000,
    SUITE_SELECTION: 10_000,
    SUITE_SHORTCUT: 3_000,
    SUITE_TRICHOTOMY: 1_000,
    SUITE_STEINER: 100,
    SUITE_WINDOW: 700,
    SUITE_METRIC: 1_000,
}

# Worker threads for the verification fan-out
ENV_THREADS = "H3BOUND_THREADS"
DEFAULT_THREADS = 4

# Failures kept verbatim in a report; the count is always exact
MAX_REPORTED_FAILURES = 20

# Command names
COMMAND_CONSTANTS = "constants"
COMMAND_GRAPHS = "graphs"
COMMAND_STEINER = "steiner"
COMMAND_LIFT = "lift"
COMMAND_SHORTCUT = "shortcut"
COMMAND_VERIFY = "verify"
COMMAND_RENDER = "render"
COMMANDS = [
    COMMAND_CONSTANTS,
    COMMAND_GRAPHS,
    COMMAND_STEINER,
    COMMAND_LIFT,
    COMMAND_SHORTCUT,
    COMMAND_VERIFY,
    COMMAND_RENDER,
]

# Configuration keys used by RunConfig
CONF_COMMAND = "command"
CONF_SEED = "seed"
CONF_TRIALS = "trials"
CONF_DELTA = "delta"
CONF_TOL = "tol"
CONF_N = "n"
CONF_FORMAT = "format"
CONF_OUT = "out"
CONF_REPLAY = "replay"
CONF_SUITE = "suite"
CONF_INPUT = "input"
CONF_PLANE = "plane"
CONF_VERBOSE = "verbose"

# Output formats
FORMAT_JSON = "json"
FORMAT_CSV = "csv"
FORMAT_SVG = "svg"
FORMAT_TEXT = "text"
FORMATS = [FORMAT_JSON, FORMAT_CSV, FORMAT_SVG, FORMAT_TEXT]

DEFAULT_SEED = 0
DEFAULT_N = 2
DEFAULT_FORMAT = FORMAT_TEXT
DEFAULT_PLANE = "xy"

# Exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_RANGE = 2
EXIT_USAGE = 64
EXIT_DATA = 65
