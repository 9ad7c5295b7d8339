import json
import logging
import math
import re
import sys
from fractions import Fraction

from . import g
from .errors import InputError


class JsonFormatError(InputError):
    fields = ("path",)


def dbg(*args):
    """Emit a debug message."""
    logging.debug(*args)


def xprint(stuff, end=None):
    """ Print to stdout. """
    print(stuff, end=end)


def F(key, nb=0, na=0, textlib=None):
    """Format text.

    :param nb: newline before
    :type nb: int
    :param na: newline after
    :type na: int
    :param textlib: the dictionary to use (defaults to g.text if not given)
    :type textlib: dict
    :returns: A string, potentially containing one or more %s
    :rtype: str
    """
    textlib = textlib or g.text

    assert key in textlib
    text = textlib[key].replace("&&", "%s")

    return "\n" * nb + text + "\n" * na


def load_json(path):
    """ Read a JSON document, mapping every failure to JsonFormatError. """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)

    except OSError as e:
        raise JsonFormatError("cannot read %s: %s" % (path, e.strerror),
                              path=path) from e

    except json.JSONDecodeError as e:
        raise JsonFormatError("malformed JSON in %s: %s" % (path, e),
                              path=path) from e


def dump_json(obj, path=None, indent=2):
    """ Write obj as JSON to path, or to stdout when path is None or '-'. """
    if path in (None, "-"):
        json.dump(obj, sys.stdout, indent=indent)
        sys.stdout.write("\n")
        return

    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=indent)
        fh.write("\n")

    dbg("wrote %s", path)


def reject_unknown_keys(raw, allowed, what, error=InputError):
    """ Raise error if the mapping raw carries keys outside allowed. """
    if not isinstance(raw, dict):
        raise error("%s must be a JSON object" % what)

    unknown = sorted(set(raw) - set(allowed))

    if unknown:
        raise error("unknown key(s) in %s: %s" % (what, ", ".join(unknown)))


_decimal_rx = re.compile(r"^\s*[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?\s*$")
_ratio_rx = re.compile(r"^\s*[-+]?\d+\s*/\s*\d+\s*$")


def to_fraction(value, what="value", error=InputError):
    """ Exact value of a probability given as a decimal string, a ratio
    string like "1/3", an int or a double.

    Doubles are taken at their shortest decimal representation, so 0.1
    becomes 1/10 rather than the binary expansion.
    """
    if isinstance(value, bool):
        raise error("%s must be a number, got %r" % (what, value))

    if isinstance(value, int):
        return Fraction(value)

    if isinstance(value, float):
        if not math.isfinite(value):
            raise error("%s must be finite, got %r" % (what, value))
        return Fraction(repr(value))

    if isinstance(value, str):
        if _decimal_rx.match(value):
            return Fraction(value.strip())
        if _ratio_rx.match(value):
            num, den = value.split("/")
            if int(den) == 0:
                raise error("%s has a zero denominator: %r" % (what, value))
            return Fraction(int(num), int(den))

    raise error("%s must be a number or decimal string, got %r"
                % (what, value))


def popcount(bits):
    """ Number of set bits of a non-negative int. """
    return bin(bits).count("1")


def bit_indices(bits):
    """ Indices of the set bits of bits, ascending. """
    out = []
    i = 0

    while bits:
        if bits & 1:
            out.append(i)
        bits >>= 1
        i += 1

    return out
