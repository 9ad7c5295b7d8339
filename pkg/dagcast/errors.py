""" Exception hierarchy shared by all dagcast modules.

Errors split in two families so the command line can map them to exit
codes: problems with what the user handed in, and failures of a
computation that was started on valid input.

"""


class DagcastError(Exception):

    """ Base class; subclasses list their structured fields in `fields`. """

    fields = ()

    def __init__(self, message, **kwargs):
        super().__init__(message)
        self.message = message
        for name in self.fields:
            setattr(self, name, kwargs.pop(name, None))
        if kwargs:
            raise TypeError("unexpected fields %s" % sorted(kwargs))

    def as_dict(self):
        """ Return a JSON-friendly description of the error. """
        out = {"error": type(self).__name__, "message": self.message}
        for name in self.fields:
            out[name] = _plain(getattr(self, name))
        return out


class InputError(DagcastError):
    """ The input files, arguments or parameters are not acceptable. """


class ComputeError(DagcastError):
    """ A computation on valid input failed. """


def _plain(value):
    if isinstance(value, (tuple, list, set, frozenset)):
        return [_plain(v) for v in value]
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)
