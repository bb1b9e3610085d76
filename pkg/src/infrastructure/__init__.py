"""Infrastructure layer: integration backends and report output."""
