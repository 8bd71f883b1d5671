"""Finite-difference Fokker-Planck solvers and a Zakai filter for SDEs driven by alpha-stable Levy noise."""

__version__ = "0.1.0"
