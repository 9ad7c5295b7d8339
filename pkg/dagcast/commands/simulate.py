import os

from .. import g, paths, screen, util
from ..connectivity import IidLinkProcess, load_process
from ..errors import InputError
from ..fixtures import get_fixture, load
from ..graph import load_network
from ..sim import ARRIVALS, CHECK_LEVELS, POLICIES, SimConfig, run, sweep, \
    write_csv
from . import INPUT_ARGS, arg, command, load_inputs

SWEEP_KEYS = ("net", "process", "p", "policies", "lambdas", "seeds", "slots",
              "warmup", "arrival", "lambda_design")


@command('simulate', 'simulate one broadcast policy run',
         *INPUT_ARGS,
         arg('--policy', choices=POLICIES, required=True),
         arg('--lambda', dest='lam', type=float, required=True,
             help='arrival rate at the source, packets/slot'),
         arg('--slots', type=int, required=True),
         arg('--seed', type=int, required=True),
         arg('--arrival', choices=ARRIVALS, default='poisson'),
         arg('--warmup', type=int,
             help='slots left out of delay statistics (default slots/10)'),
         arg('--lambda-design', dest='lambda_design', type=float,
             help='design rate of the rand policy'),
         arg('--check-invariants', dest='check_level', choices=CHECK_LEVELS),
         arg('--out', metavar='FILE', required=True,
             help="report file, '-' for stdout"))
def simulate(args):
    """ Run one simulation and write its JSON report. """
    net, process = load_inputs(args)
    cfg = SimConfig(net, process, policy=args.policy, lam=args.lam,
                    slots=args.slots, seed=args.seed, warmup=args.warmup,
                    arrival=args.arrival, lambda_design=args.lambda_design,
                    check_level=args.check_level)
    report = run(cfg)
    util.dump_json(report.to_dict(), args.out)

    if args.out != "-":
        screen.note(util.F('report written') % args.out)

    return g.EXIT_OK


def _resolve(base, path):
    return path if os.path.isabs(path) else os.path.join(base, path)


def sweep_configs(raw, base="."):
    """ SimConfigs of a sweep spec: p x policy x lambda x seed. """
    util.reject_unknown_keys(raw, SWEEP_KEYS, "sweep spec")

    for key in ("net", "lambdas", "slots"):
        if key not in raw:
            raise InputError("sweep spec is missing %r" % key)

    process = None

    if str(raw["net"]).startswith("fixture:"):
        net, process = load(get_fixture(raw["net"].split(":", 1)[1]))
    else:
        net = load_network(_resolve(base, raw["net"]))

    if "process" in raw:
        process = load_process(_resolve(base, raw["process"]), net)

    if "p" in raw:
        fractions = [util.to_fraction(p, "p") for p in raw["p"]]
        processes = [(p, IidLinkProcess.uniform(net.m, p)) for p in fractions]
    elif process is not None:
        processes = [(None, process)]
    else:
        raise InputError("sweep spec needs 'p' or 'process'")

    cfgs = []

    for p, proc in processes:
        for policy in raw.get("policies", ["pistar"]):
            for lam in raw["lambdas"]:
                for seed in raw.get("seeds", [0]):
                    cfgs.append(SimConfig(
                        net, proc, policy=policy, lam=lam,
                        slots=raw["slots"], seed=seed, run_index=len(cfgs),
                        warmup=raw.get("warmup"),
                        arrival=raw.get("arrival", "poisson"),
                        lambda_design=raw.get("lambda_design"),
                        p=None if p is None else float(p)))

    return cfgs


@command('sweep', 'run a parameter sweep into a CSV table',
         arg('--spec', metavar='FILE', required=True,
             help="sweep spec JSON; 'fixture:NAME' nets resolve to bundled "
                  "fixtures"),
         arg('--out', metavar='FILE', required=True,
             help="CSV file, '-' for stdout"),
         arg('--workers', type=int))
def sweep_command(args):
    """ Run every point of a sweep spec and write the CSV. """
    spec = args.spec

    if spec.startswith("fixture:"):
        spec = paths.resolve_fixture_file(spec.split(":", 1)[1] + ".json")

    raw = util.load_json(spec)
    cfgs = sweep_configs(raw, os.path.dirname(os.path.abspath(spec)))
    rows = sweep(cfgs, args.workers)
    write_csv(rows, args.out)

    if args.out != "-":
        screen.note(util.F('sweep written') % (len(rows), args.out))

    return g.EXIT_OK
