"""Modeling, execution, and starvation-risk analysis for distributed abstract state machines."""

__version__ = "0.1.0"
