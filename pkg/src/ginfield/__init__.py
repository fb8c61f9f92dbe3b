"""Numerical laboratory for the eigenbasis of the disk, log-kernel
expansions, Ginibre eigenvalue statistics, and their Gaussian limit field."""

__version__ = "0.1.0"
