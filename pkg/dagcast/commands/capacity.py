from .. import g, screen
from ..capacity import approx_capacity, capacity_bounds, compute_capacity, \
    compute_static_capacity
from ..connectivity import stationary_distribution
from . import INPUT_ARGS, arg, command, load_inputs


@command('capacity', 'broadcast capacity of a network and process',
         *INPUT_ARGS,
         arg('--static', action='store_true',
             help='every link always ON; --process is not needed'),
         arg('--bounds', type=float, metavar='P',
             help='lower and upper bounds for link ON probability P'),
         arg('--approx', type=float, metavar='P',
             help='approximation for link ON probability P'),
         arg('--all-cuts', action='store_true',
             help='impose every proper cut, not only single-node cuts'),
         arg('--exact', action='store_true',
             help='solve over rationals as well'))
def capacity(args):
    """ Print the capacity result as JSON. """
    static_only = args.static or args.bounds is not None or \
        args.approx is not None
    net, process = load_inputs(args, need_process=not static_only)
    options = dict(all_cuts=args.all_cuts, exact=args.exact)

    if args.bounds is not None:
        static = compute_static_capacity(net, **options)
        bounds = capacity_bounds(net, args.bounds, static)
        out = {"lower": round(bounds.lower, 12),
               "upper": round(bounds.upper, 12),
               "p": bounds.p, "premise": bounds.premise}

    elif args.approx is not None:
        static = compute_static_capacity(net, **options)
        approx = approx_capacity(net, args.approx, static)
        out = {"lambda_star": round(approx.value, 12),
               "approximation": True,
               "certificate": [[act.edges(), round(float(w), 12)]
                               for act, w in approx.certificate]}

    elif args.static:
        out = compute_static_capacity(net, **options).to_dict()

    else:
        table = stationary_distribution(process)
        out = compute_capacity(net, table, **options).to_dict()

    screen.emit_json(out)
    return g.EXIT_OK
