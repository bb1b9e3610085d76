"""Norm evaluation engines: closed form, quadrature and Monte Carlo."""
