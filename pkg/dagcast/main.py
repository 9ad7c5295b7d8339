"""
dagcast.

Broadcast capacity and throughput-optimal broadcast scheduling for
time-varying wireless DAGs.

This program is free software: you can redistribute it and/or modify
it under the terms of the GNU General Public License as published by
the Free Software Foundation, either version 3 of the License, or
(at your option) any later version.

This program is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU General Public License for more details.

You should have received a copy of the GNU General Public License
along with this program.  If not, see <http://www.gnu.org/licenses/>.

"""

import sys
import traceback as traceback_py

from . import g, init, screen, util
from . import commands  # noqa: F401  registers the subcommands
from .errors import ComputeError, InputError


def main(argv=None):
    """ Run one subcommand and return its exit code. """
    args = init.init(argv)
    util.dbg("function call: %s", args.function.__name__)

    try:
        return args.function(args)

    except InputError as e:
        _report(e)
        return g.EXIT_INPUT

    except ComputeError as e:
        _report(e)
        return g.EXIT_COMPUTE

    except KeyboardInterrupt:
        return g.EXIT_FAILED

    except Exception as e:  # pylint: disable=broad-except
        _report(e)
        return g.EXIT_FAILED


def _report(err):
    if g.debug_mode:
        util.dbg(''.join(traceback_py.format_exception(*sys.exc_info())))

    screen.emit_error(err)
