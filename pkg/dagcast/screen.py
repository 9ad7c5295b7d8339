""" Terminal output: results on stdout, notes and errors on stderr. """

import json
import sys

from . import util


def msgexit(msg, code=0):
    """ Print a message and exit. """
    util.xprint(msg)
    sys.exit(code)


def note(msg):
    """ Print a human-readable line to stderr. """
    print(msg, file=sys.stderr)


def emit_json(obj):
    """ Print obj as one JSON document on stdout. """
    util.dump_json(obj)


def emit_error(err):
    """ Print an error as a single JSON line on stderr. """
    if hasattr(err, "as_dict"):
        out = err.as_dict()
    else:
        out = {"error": type(err).__name__, "message": str(err)}

    print(json.dumps(out, separators=(",", ":")), file=sys.stderr)
