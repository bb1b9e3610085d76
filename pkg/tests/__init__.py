"""Tests initialization."""

