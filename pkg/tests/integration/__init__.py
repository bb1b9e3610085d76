"""Integration tests initialization."""

