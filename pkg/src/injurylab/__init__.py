"""Multi-source soccer athlete monitoring and injury-risk prediction toolkit."""

__version__ = "0.1.0"
