"""Period matrices and theta functions for the W9 Teichmuller-curve family."""

__version__ = "0.1.0"
