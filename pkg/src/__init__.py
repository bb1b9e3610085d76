"""glstool - dilation operators on Grand Lebesgue Spaces, with a verification harness."""
__version__ = "1.0.0"
