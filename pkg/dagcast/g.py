""" Module for holding globals that are needed throughout dagcast. """

import os

from . import paths

debug_mode = False
log_to_file = False
commands = []
CFFILE = os.path.join(paths.get_config_dir(), "config.json")
LOGFILE_NAME = "dagcast.log"

# bumped whenever the report layout changes
REPORT_SCHEMA = 1
RNG_NAME = "numpy-pcg64/1"

SWEEP_COLUMNS = ("lambda", "p", "policy", "mean_delay", "delivered_rate",
                 "stable", "seed")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_COMPUTE = 3

text = {
    'unknown config': 'Unknown config item: &&',
    'config reset': '&& set to && (default)',
    'config all reset': 'Default configuration reinstated',
    'config help': 'Enter dagcast config <key> <value> to change',
    'fixture pass': 'PASS  &&: &&',
    'fixture fail': 'FAIL  &&: &&',
    'fixture summary': '&& of && fixture expectations passed',
    'report written': 'Report written to &&',
    'sweep written': '&& sweep rows written to &&',
    'bad slots': 'slots must be at least 1, got &&',
}
