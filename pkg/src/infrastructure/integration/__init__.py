"""Integration backends used by the norm service."""
