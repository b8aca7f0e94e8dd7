"""Annotation-driven test inputs and assertions for method signatures."""

__version__ = "0.1.0"
