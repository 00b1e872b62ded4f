"""Minimal setup.py for backwards compatibility with older pip versions."""
from setuptools import setup

setup()

