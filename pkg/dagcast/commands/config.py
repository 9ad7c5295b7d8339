from .. import config, g, util
from . import arg, command


def showconfig():
    """ Dump config data. """
    longest_key = max(len(setting) for setting in config)
    s = "  %-{0}s : %s".format(longest_key)

    for setting in config:
        util.xprint(s % (setting.lower(), config[setting].display))

    util.xprint("\n" + util.F('config help'))


def setconfig(key, val):
    """ Set configuration variable; return the message to show. """
    key = key.replace("-", "_")

    if key.upper() == "ALL" and val.upper() == "DEFAULT":
        config.reset()
        config.save()
        return util.F('config all reset')

    elif key.upper() not in config:
        return util.F('unknown config') % key

    elif val.upper() == "DEFAULT":
        att = config[key.upper()]
        att.value = att.default
        att.temp_value = None
        config.save()
        return util.F('config reset') % (key, att.display)

    # config.save() will be called by config.set() method
    return config[key.upper()].set(val)


@command('config', 'show or change persistent settings',
         arg('key', nargs='?'),
         arg('value', nargs='?'))
def config_command(args):
    """ List settings, show one, or set KEY to VALUE. """
    if args.key is None:
        showconfig()
        return g.EXIT_OK

    if args.value is None:
        key = args.key.replace("-", "_")
        if key.upper() not in config:
            util.xprint(util.F('unknown config') % args.key)
            return g.EXIT_INPUT
        util.xprint("%s : %s" % (key.lower(), config[key].display))
        return g.EXIT_OK

    message = setconfig(args.key, args.value)
    util.xprint(message)

    ok = " set to " in message or message == util.F('config all reset')
    return g.EXIT_OK if ok else g.EXIT_INPUT
