"""Deterministic multiplayer tower-defense environment for team studies."""

__version__ = "0.1.0"
