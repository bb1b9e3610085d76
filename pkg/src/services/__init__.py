"""Numerical services and the verification experiments built on them."""
