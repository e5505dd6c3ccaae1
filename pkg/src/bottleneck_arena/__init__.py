"""Bottleneck routing games: exponential player costs, dynamics, PoA and expansion chains."""

__version__ = "0.1.0"
