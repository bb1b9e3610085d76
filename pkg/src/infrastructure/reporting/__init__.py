"""Report output (JSONL rows and CSV summary)."""
