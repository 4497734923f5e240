"""molforge: desk-scale de novo small-molecule design engine."""

__version__ = "0.1.0"
