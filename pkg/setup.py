# setup.py
from setuptools import setup, find_packages

# Most configuration is in pyproject.toml, but this helps setuptools
# find the package structure correctly.
setup(
    packages=find_packages(include=["capwave_core", "capwave_core.*"])
)
