import json
import math
import os
import sys

from . import g, paths, util


class ConfigItem:

    """ A configuration item. """

    def __init__(self, name, value, minval=None, maxval=None, check_fn=None,
            allowed_values=None, env=None):
        """ If specified, the check_fn should return a dict.

        {valid: bool, message: success/fail mesage, value: value to set}

        env names an environment variable that overrides the stored value.

        """
        self.default = self.value = value
        self.temp_value = None
        self.name = name
        self.type = type(value)
        self.maxval, self.minval = maxval, minval
        self.check_fn = check_fn
        self.env = env
        self.allowed_values = []
        if allowed_values:
            self.allowed_values = allowed_values

    @property
    def get(self):
        """ Return value. """
        if self.env and os.environ.get(self.env, "").strip():
            return self._from_env(os.environ[self.env])

        if self.temp_value is None:
            return self.value
        else:
            return self.temp_value

    @property
    def display(self):
        """ Return value in a format suitable for display. """
        retval = self.value

        if self.env and os.environ.get(self.env, "").strip():
            retval = "%s (from %s)" % (self.get, self.env)

        return retval

    def _from_env(self, raw):
        try:
            return self.type(float(raw)) if self.type in (int, float) \
                else self.type(raw)

        except ValueError:
            util.dbg("ignoring bad %s=%r", self.env, raw)
            return self.value if self.temp_value is None else self.temp_value

    def _parse(self, text):
        """ (value, None) for acceptable text, else (None, failure). """
        if self.allowed_values:
            if text in self.allowed_values:
                return text, None
            return None, "%s must be one of %s, got %s" % (
                self.name, " | ".join(self.allowed_values), text or "<nothing>")

        if self.type not in (int, float):
            return text, None

        try:
            number = float(text)
            if not math.isfinite(number):
                raise ValueError(text)
        except ValueError:
            return None, "%s needs a number, got %s" % (self.name,
                                                        text or "<nothing>")

        if self.type == int:
            if not number.is_integer():
                return None, "%s needs a whole number, got %s" % (self.name,
                                                                  text)
            number = int(number)

        low = self.minval is not None and number < self.minval
        high = self.maxval is not None and number > self.maxval

        if low or high:
            return None, "%s must lie in [%s, %s], got %s" % (
                self.name, self.minval, self.maxval, text)

        return number, None

    def set(self, value, is_temp=False):
        """ Validate and store value; return the message to show.

        Successful messages contain " set to ", failures never do.
        """
        value, failure = self._parse(str(value).strip())

        if failure:
            return failure

        message = None

        if self.check_fn:
            checked = self.check_fn(value)

            if not checked["valid"]:
                return checked["message"]

            value = checked.get("value", value)
            message = checked.get("message")

        if is_temp:
            self.temp_value = value
        else:
            self.temp_value = None
            self.value = value
            Config.save()

        return message or "%s set to %s" % (self.name, value)


def check_probability(val):
    """ Accept 0 < val <= 1. """
    if 0 < val <= 1:
        return dict(valid=True, value=val)

    return dict(valid=False, message="update_prob must lie in (0, 1], got %s"
                % val)


class _Config:

    """ Holds various configuration values. """

    _configitems = [
            ConfigItem("match_limit", 10 ** 6, minval=1,
                env="DAGCAST_MATCH_LIMIT"),
            ConfigItem("cut_limit", 20, minval=1, maxval=30),
            ConfigItem("odd_set_limit", 20, minval=1, maxval=30),
            ConfigItem("table_limit", 2 ** 16, minval=1),
            ConfigItem("lp_solver", "simplex",
                allowed_values="simplex highs".split()),
            ConfigItem("lp_tolerance", 1e-9, minval=0.0, maxval=1e-3),
            ConfigItem("lp_max_pivots", 200000, minval=1),
            ConfigItem("lp_column_limit", 2 * 10 ** 6, minval=1),
            ConfigItem("dense_lp_limit", 4 * 10 ** 6, minval=1),
            ConfigItem("power_tolerance", 1e-12, minval=0.0, maxval=1e-3),
            ConfigItem("power_max_iter", 10 ** 6, minval=1),
            ConfigItem("stability_theta", 0.01, minval=0.0),
            ConfigItem("check_level", "sampled",
                allowed_values="off sampled every-slot".split()),
            ConfigItem("check_stride", 100, minval=1),
            ConfigItem("update_prob", 1.0, check_fn=check_probability),
            ConfigItem("workers", 1, minval=1, maxval=256),
            ConfigItem("series_points", 2000, minval=10),
            ]

    def __getitem__(self, key):
        for i in self._configitems:
            if i.name.upper() == key.upper():
                return i
        raise KeyError(key)

    def __getattr__(self, name):
        try:
            return self[name]
        except KeyError:
            raise AttributeError(name)

    def __iter__(self):
        return (i.name.upper() for i in self._configitems)

    def __contains__(self, key):
        return any(i.name.upper() == key.upper() for i in self._configitems)

    def reset(self):
        """ Reinstate every default, discarding temporary values. """
        for i in self._configitems:
            i.value = i.default
            i.temp_value = None

    def save(self):
        """ Save current config to file. """
        config = {setting.lower(): self[setting].value for setting in self}
        paths.get_config_dir(create=True)

        with open(g.CFFILE, "w") as cf:
            json.dump(config, cf, indent=2)

        util.dbg("Saved config: " + g.CFFILE)

    def load(self):
        """ Override config if config file exists. """
        if os.path.exists(g.CFFILE):
            with open(g.CFFILE, "r") as cf:
                try:
                    saved_config = json.load(cf)
                except json.JSONDecodeError:
                    util.dbg("Unreadable config file %s ignored", g.CFFILE)
                    return

            for k, v in saved_config.items():

                try:
                    self[k].value = v

                except KeyError:  # Ignore unrecognised data in config
                    util.dbg("Unrecognised config item: %s", k)

            util.dbg("Loaded config: %s", g.CFFILE)

Config = _Config()
del _Config # _Config is a singleton and should not have more instances
# Prevent module from being deleted
# http://stackoverflow.com/questions/5365562/why-is-the-value-of-name-changing-after-assignment-to-sys-modules-name
ref = sys.modules[__name__]
# Any module trying to import config will get the Config object instead
sys.modules[__name__] = Config
