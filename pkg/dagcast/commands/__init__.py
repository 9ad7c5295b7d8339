import collections

from .. import fixtures, g
from ..connectivity import load_process
from ..errors import InputError
from ..graph import load_network

Command = collections.namedtuple('Command', 'name usage arguments function')

## @command decorator
##
## The @command decorator takes the subcommand name, a one-line usage
## string and the argparse arguments of the subcommand, each built with
## arg(). The decorated function receives the parsed namespace and
## returns the exit code.
def command(name, usage, *arguments):
    """ Decorator to register a dagcast subcommand. """
    def decorator(function):
        cmd = Command(name, usage, arguments, function)
        g.commands.append(cmd)
        return function
    return decorator


def arg(*flags, **kwargs):
    """ Argument spec passed through to argparse's add_argument. """
    return flags, kwargs


INPUT_ARGS = (
    arg('--net', metavar='FILE', help='network JSON file'),
    arg('--process', metavar='FILE', help='configuration process JSON file'),
    arg('--fixture', metavar='NAME', help='use a bundled fixture instead'),
)


def load_inputs(args, need_process=True):
    """ (Network, process) from --fixture or --net/--process. """
    if args.fixture:
        if args.net or args.process:
            raise InputError("--fixture cannot be combined with --net or "
                             "--process")
        return fixtures.load(fixtures.get_fixture(args.fixture))

    if not args.net:
        raise InputError("either --fixture or --net is required")

    net = load_network(args.net)

    if not args.process:
        if need_process:
            raise InputError("--process is required with --net")
        return net, None

    return net, load_process(args.process, net)


# Placed at bottom to deal with cyclic imports
from . import capacity, simulate, fixture, config
