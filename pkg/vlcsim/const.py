"""Constants for vlcsim."""
ELECTRON_CHARGE = 1.602176634e-19

ROLE_LEGITIMATE = "legitimate"
ROLE_ROGUE = "rogue"
ROLE_DARK = "dark"
ROLES = (ROLE_LEGITIMATE, ROLE_ROGUE, ROLE_DARK)

LEVEL_ERROR = "error"
LEVEL_WARNING = "warning"

# Room
DEFAULT_ROOM_WIDTH = 7.0
DEFAULT_ROOM_DEPTH = 7.0
DEFAULT_ROOM_HEIGHT = 2.8
DEFAULT_REFLECTIVITY = 0.8
DEFAULT_REFERENCE_PLANE_HEIGHT = 0.85

# Photodetector
DEFAULT_RECEIVER_AREA = 1e-4
DEFAULT_RECEIVER_FOV = 60.0
DEFAULT_RECEIVER_GAIN = 4.5
DEFAULT_RESPONSIVITY = 0.54

# Signal chain
DEFAULT_PAM_ORDER = 4
DEFAULT_MODULATION_INDEX = 0.2
DEFAULT_BANDWIDTH = 1e6
DEFAULT_BACKGROUND_CURRENT = 5.1e-3
DEFAULT_I2_FACTOR = 0.562
DEFAULT_EXTRA_NOISE_VARIANCE = 0.0

DEFAULT_LUMINOUS_EFFICACY = 240.0

# Sweep
DEFAULT_CELL_SIZE = 0.1
DEFAULT_PATCH_SIZE = 0.1
DEFAULT_BER_THRESHOLD = 1e-3

# Minimum lighting level on the desk surface, lx
LIGHTING_MINIMUM = 300.0

# Artifacts
FORMAT_CSV = "csv"
FORMAT_PGM = "pgm"
FORMAT_JSON = "json"
FORMATS = (FORMAT_CSV, FORMAT_PGM, FORMAT_JSON)

FILE_FIELD = "field.csv"
FILE_BER_S = "ber_s.pgm"
FILE_BER_R = "ber_r.pgm"
FILE_ILLUMINANCE = "illuminance.pgm"
FILE_SUMMARY = "summary.json"

PGM_BER_FLOOR = 1e-8
PGM_BER_DECADES = 8
PGM_ILLUMINANCE_SCALE = 1000.0

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID_SCENE = 2
EXIT_IO = 3

PRESETS = {
    "g1_central": "G1 3x4 type-g grid, central rogue luminaire",
    "g1_peripheral": "G1 3x4 type-g grid, peripheral rogue luminaire",
    "g2_one": "G2 2x4 type-g grid + 1x3 downlight row, rogue d2",
    "g2_three": "G2 2x4 type-g grid + 1x3 downlight row, rogue d1-d3",
    "g2_one_wide45": "G2 with one rogue downlight, downlight semi-angle 45 deg",
    "gc_half": "GC 2x3 type-g grid + 10 downlight circle, rogue d1-d5",
    "gc_full": "GC 2x3 type-g grid + 10 downlight circle, rogue d1-d10",
}
