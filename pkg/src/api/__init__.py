"""API interfaces and contracts."""
