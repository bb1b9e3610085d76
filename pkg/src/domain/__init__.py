"""Domain models: exponents, regions, psi functions, test functions, reports."""
