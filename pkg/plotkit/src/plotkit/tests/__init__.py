"""In-package test suite; run with pytest."""
