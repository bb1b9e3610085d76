"""Core functionality: configuration, logging, errors and special functions."""
