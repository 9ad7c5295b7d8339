import argparse
import logging
import os
import platform
import sys
import tempfile

from . import __version__, config, g, paths, screen
from .util import dbg


def init(argv=None):
    """ Initial setup; return the parsed command line. """
    args = _process_cl_args(argv)
    config.load()
    return args


def build_parser():
    """ Parser with one subcommand per registered command. """
    parser = argparse.ArgumentParser(
        prog="dagcast",
        description="Broadcast capacity and max-weight broadcast "
                    "simulation for time-varying wireless DAGs.")
    parser.add_argument('--version', '-v', action='store_true')
    parser.add_argument('--debug', '-d', action='store_true')
    parser.add_argument('--logging', '-l', action='store_true')
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')

    for cmd in g.commands:
        p = sub.add_parser(cmd.name, help=cmd.usage, description=cmd.usage)

        for flags, kwargs in cmd.arguments:
            p.add_argument(*flags, **kwargs)

        p.set_defaults(function=cmd.function)

    return parser


def _process_cl_args(argv=None):
    """ Process command line arguments. """
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.version:
        screen.msgexit(_get_version_info())

    if args.command is None:
        parser.print_usage(sys.stderr)
        sys.exit(g.EXIT_INPUT)

    if args.debug or os.environ.get("dagcastdebug") == "1":
        g.debug_mode = True

    if args.logging or os.environ.get("dagcastlog") == "1":
        g.log_to_file = True

    if g.log_to_file:
        logfile = os.path.join(tempfile.gettempdir(), g.LOGFILE_NAME)
        logging.basicConfig(level=logging.DEBUG, filename=logfile)

    elif g.debug_mode:
        logging.basicConfig(level=logging.DEBUG)

    else:
        logging.basicConfig(level=logging.WARNING)

    dbg("command line: %s", argv if argv is not None else sys.argv[1:])
    return args


def _get_version_info():
    """ Return version and platform info. """
    import networkx
    import numpy
    import scipy

    out = "dagcast version    : " + __version__
    out += "\nnumpy version      : " + numpy.__version__
    out += "\nscipy version      : " + scipy.__version__
    out += "\nnetworkx version   : " + networkx.__version__
    out += "\nPython version     : " + sys.version
    out += "\nMachine type       : " + platform.machine()
    out += "\nPlatform           : " + platform.platform()
    out += "\nConfig dir         : " + paths.get_config_dir()
    out += "\nRandom generator   : " + g.RNG_NAME
    return out
