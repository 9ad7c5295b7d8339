import os

mswin = os.name == "nt"


def get_config_dir(create=False):
    """ Get user's configuration directory for dagcast. """
    if mswin:
        confdir = os.environ["APPDATA"]

    elif 'XDG_CONFIG_HOME' in os.environ:
        confdir = os.environ['XDG_CONFIG_HOME']

    else:
        confdir = os.path.join(os.path.expanduser("~"), '.config')

    dagcast_confdir = os.path.join(confdir, "dagcast")

    if create:
        os.makedirs(dagcast_confdir, exist_ok=True)

    return dagcast_confdir


def get_fixture_dir():
    """ Directory holding the bundled fixture files. """
    return os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")


def resolve_fixture_file(name):
    """ Path of a bundled fixture file, or name unchanged if it is a path. """
    if os.path.sep in name or os.path.exists(name):
        return name
    return os.path.join(get_fixture_dir(), name)
