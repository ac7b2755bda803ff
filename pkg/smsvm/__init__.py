"""Smoothed-hinge SVM solver with l1/l2 penalties."""

__version__ = "0.1.0"
