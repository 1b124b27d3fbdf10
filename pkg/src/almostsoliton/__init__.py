"""Numerical verification of four-dimensional almost gradient Ricci solitons."""
from .expr import parse, to_string
from .tensor import Chart, MetricField, ScalarField, curvature_at
from .soliton import SolitonReport, verify

__all__ = ["Chart", "MetricField", "ScalarField", "SolitonReport", "curvature_at", "parse", "to_string", "verify"]
