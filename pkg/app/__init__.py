"""Numerical homogenization of HJB operators."""
