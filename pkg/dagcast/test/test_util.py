#!/usr/bin/env python
# -*- coding: utf-8 -*-
import json
from fractions import Fraction

import pytest

import dagcast.util as util
from dagcast.errors import InputError


@pytest.mark.parametrize(
    "value,expected",
    (
        (1, Fraction(1)),
        (0.1, Fraction(1, 10)),
        ("0.25", Fraction(1, 4)),
        ("1/3", Fraction(1, 3)),
        (" 2 / 6 ", Fraction(1, 3)),
        ("1e-1", Fraction(1, 10)),
    ),
)
def test_to_fraction(value, expected):
    assert util.to_fraction(value) == expected


@pytest.mark.parametrize("value", (True, "abc", "1/0", None, float("nan"),
                                   [1]))
def test_to_fraction_rejects(value):
    with pytest.raises(InputError):
        util.to_fraction(value)


def test_to_fraction_custom_error():
    class Boom(InputError):
        pass

    with pytest.raises(Boom):
        util.to_fraction("x", "p", Boom)


@pytest.mark.parametrize(
    "bits,indices",
    (
        (0, []),
        (1, [0]),
        (0b1010, [1, 3]),
        (0b111, [0, 1, 2]),
    ),
)
def test_bit_helpers(bits, indices):
    assert util.bit_indices(bits) == indices
    assert util.popcount(bits) == len(indices)


def test_F_formats_placeholders():
    assert util.F('fixture pass') % ("a", "b") == "PASS  a: b"
    assert util.F('config help', nb=1).startswith("\n")


def test_reject_unknown_keys():
    util.reject_unknown_keys({"a": 1}, ("a", "b"), "thing")

    with pytest.raises(InputError, match="zzz"):
        util.reject_unknown_keys({"a": 1, "zzz": 2}, ("a",), "thing")

    with pytest.raises(InputError):
        util.reject_unknown_keys([1, 2], ("a",), "thing")


def test_load_json_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")

    with pytest.raises(util.JsonFormatError) as info:
        util.load_json(str(bad))
    assert info.value.path == str(bad)

    with pytest.raises(util.JsonFormatError):
        util.load_json(str(tmp_path / "missing.json"))


def test_dump_json_to_file_and_stdout(tmp_path, capsys):
    target = tmp_path / "out.json"
    util.dump_json({"x": 1}, str(target))
    assert json.loads(target.read_text()) == {"x": 1}

    util.dump_json({"y": 2})
    assert json.loads(capsys.readouterr().out) == {"y": 2}


def test_error_as_dict():
    err = util.JsonFormatError("broken", path="/tmp/x")
    assert err.as_dict() == {"error": "JsonFormatError", "message": "broken",
                             "path": "/tmp/x"}

    with pytest.raises(TypeError):
        util.JsonFormatError("broken", nope=1)
