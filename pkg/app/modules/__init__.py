"""Operators, solvers and study drivers for hjb-homog."""
