"""Critical-exponent laboratory for the p-Laplace heat equation with combined nonlinearities."""

__version__ = "0.1.0"
