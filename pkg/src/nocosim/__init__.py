"""Deterministic simulator for register gates driven by frequent noisy
actuator operations, with distillation and threshold analysis on top."""

__version__ = "0.1.0"

from . import channels, cli, faulttol, gates, qcore, zeno  # noqa: F401
