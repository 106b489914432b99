import os
import pathlib
import re

from setuptools import setup

__author__ = "lobound developers"
__copyright__ = "Copyright 2026, lobound developers"

THIS_DIR = os.path.abspath(os.path.dirname(__file__))


def get_requirements(req_file):
    requirements = []

    for r in open(os.path.join(THIS_DIR, "requirements", req_file)).read().splitlines():
        if r.strip() and not r.startswith("-r"):
            requirements.append(r.strip())

    return requirements


def get_version():
    source = open(os.path.join(THIS_DIR, "lobound", "_version.py")).read()

    return re.search(r'^VERSION = "([^"]+)"', source, re.M).group(1)


_ROOT_DIR = pathlib.Path(__file__).parent

with open(str(_ROOT_DIR / "README.rst")) as f:
    long_description = f.read()

setup(
    name="lobound",
    version=get_version(),
    description="Success probability bounds for postselected linear optics gates",
    long_description=long_description,
    author=__author__,
    maintainer=__author__,
    keywords=["linear optics", "quantum gates", "semidefinite programming", "duality"],
    license="MIT",
    packages=["lobound", "lobound.commands"],
    python_requires=">=3.8",
    install_requires=get_requirements("main.txt"),
    entry_points={"console_scripts": ["lobound=lobound.cli:main"]},
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Physics",
    ],
)
