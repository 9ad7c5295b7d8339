from .. import fixtures, g, screen, util
from . import arg, command


@command('fixtures', 'list or check the bundled reference instances',
         arg('action', choices=('list', 'run')),
         arg('names', nargs='*', metavar='NAME'))
def fixtures_command(args):
    """ List fixtures, or run their checks and fail on any mismatch. """
    known = fixtures.index()

    if args.action == 'list':
        for fx in known:
            util.xprint("%-16s %s" % (fx.name, fx.provenance))
        return g.EXIT_OK

    chosen = [fixtures.get_fixture(n) for n in args.names] or known
    outcomes = []

    for fx in chosen:
        for outcome in fixtures.run_fixture(fx):
            key = 'fixture pass' if outcome.passed else 'fixture fail'
            screen.note(util.F(key) % (outcome.fixture, outcome.check))
            outcomes.append(outcome)

    passed = sum(1 for o in outcomes if o.passed)
    screen.note(util.F('fixture summary') % (passed, len(outcomes)))
    fixtures.require(outcomes)
    return g.EXIT_OK
