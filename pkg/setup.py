#!/usr/bin/python3

""" setup.py for dagcast.

https://github.com/dagcast/dagcast

python setup.py sdist bdist_wheel
"""

import sys

if sys.version_info < (3, 8):
    sys.exit("dagcast requires minimum python 3.8")

from setuptools import setup

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

with open('requirements.txt', 'r') as fh:
    requirements = fh.readlines()

__version__ = "0.1.0"

options = dict(
    name="dagcast",
    version=__version__,
    description="Broadcast capacity and throughput-optimal broadcast "
                "scheduling for time-varying wireless DAGs",
    keywords=["wireless", "broadcast", "scheduling", "max-weight",
              "capacity", "linear programming", "simulation"],
    author="dagcast contributors",
    url="https://github.com/dagcast/dagcast",
    packages=['dagcast', 'dagcast.commands'],
    entry_points={'console_scripts': ['dagcast = dagcast.main:main']},
    python_requires='>=3.8',
    install_requires=requirements,
    extras_require={
        "test": [
            "pytest>=7.0",
        ],
        "docs": [
            "mkdocs-gen-files>=0.3.4",
            "mkdocs-literate-nav>=0.4.1",
            "mkdocs-material>=8.2.1",
            "mkdocstrings-python-legacy>=0.2.2",
            "mkdocstrings>=0.18.0",
        ],
    },
    classifiers=[
        "Topic :: Scientific/Engineering",
        "Topic :: System :: Networking",
        "Environment :: Console",
        "Operating System :: OS Independent",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3 :: Only",
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: GNU General Public License v3 (GPLv3)"
    ],
    package_data={"": ["README.md", "CHANGELOG.md"],
                  "dagcast": ["fixtures/*.json"]},
    long_description_content_type='text/markdown',
    long_description=long_description
)

setup(**options)
