"""Stateless game engine: graph search, costs, dynamics, solvers and analysis."""
