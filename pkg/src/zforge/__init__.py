"""Exact-arithmetic toolkit for integer power series with prescribed exceptional sets."""

__version__ = "0.1.0"
