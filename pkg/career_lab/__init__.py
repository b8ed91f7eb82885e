"""Career Lab - numerical laboratory for the Gaussian career-concerns model."""

__version__ = "1.0.0"
