"""Core: config, errors, frame model, GOP plan, metrics."""
