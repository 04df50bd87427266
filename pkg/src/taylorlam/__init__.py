"""Executable model of the linear approximation of the lambda-calculus:
beta-reduction, the resource calculus, truncated Taylor expansion, uniform
reduction, finite conservativity and the Accordion counterexample."""

import sys

# Accordion traces and deep bags recurse past the default limit.
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

__version__ = "0.1.0"
