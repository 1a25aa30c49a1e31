"""Secure throughput of TAS/MRC wiretap links and smart-meter reconstruction."""

__version__ = "0.1.0"
