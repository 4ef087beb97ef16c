"""Dot-pattern grouping with minimum spanning trees and straight offset polygons."""

__version__ = "0.1.0"
