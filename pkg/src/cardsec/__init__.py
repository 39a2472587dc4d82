"""Combinatorial designs and an exact verifier for card-deal key agreement."""

__version__ = "0.1.0"
