"""
WaveSplit - this file is needed to ensure it can be imported

See other source files for details
"""

WAVESPLIT_VERSION_MAJOR = 1
WAVESPLIT_VERSION_MINOR = 0
WAVESPLIT_VERSION_PATCH = 0

WAVESPLIT_VERSION = (
    f"{WAVESPLIT_VERSION_MAJOR}.{WAVESPLIT_VERSION_MINOR}.{WAVESPLIT_VERSION_PATCH}"
)
__version__ = WAVESPLIT_VERSION

WAVESPLIT_COPYRIGHT_YEAR = "2024"
WAVESPLIT_COPYRIGHT_NAMES = "The WaveSplit developers"

WAVESPLIT_SUPPORT_EMAIL = "the project issue tracker"

WAVESPLIT_WEBSITE = "README.md"

WAVESPLIT_DIMENSIONS_LIST = [3, 4, 5]
WAVESPLIT_SUBCOMMANDS_LIST = [
    "kernels",
    "decompose",
    "evolve-linear",
    "evolve-nls",
    "verify",
    "report",
]
WAVESPLIT_SUITES_LIST = [
    "reconstruction",
    "l2_bound",
    "matching",
    "support",
    "cone",
    "sum_space",
    "smoothing",
]
WAVESPLIT_GRID_LAYOUTS_LIST = ["uniform-midpoint", "log-linear-hybrid", "bessel-zero"]
WAVESPLIT_RESOLUTIONS_LIST = ["low", "default", "high"]

# (M, r_max) used by the verification suites for each resolution preset.
WAVESPLIT_RESOLUTION_PRESETS = {
    "low": (1024, 8.0),
    "default": (4096, 8.0),
    "high": (8192, 8.0),
}

WAVESPLIT_ENV_VARS = {
    "WAVESPLIT_THREADS": "--threads",
    "WAVESPLIT_OUTPUT_PATH": "--outpath",
    "WAVESPLIT_LEDGER": "--ledger",
}

