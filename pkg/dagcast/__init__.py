from importlib import metadata

try:
    __version__ = metadata.version("dagcast")
except metadata.PackageNotFoundError:
    __version__ = "unable to determine"
__author__ = "dagcast contributors"
__license__ = "GPLv3"
__url__ = "https://github.com/dagcast/dagcast"
