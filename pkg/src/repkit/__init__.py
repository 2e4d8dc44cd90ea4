"""Compression-based randomness estimation for numeric time series.

The workflow: reversible transforms peel known structure off a series
(returns, differencing, quantile discretization), lossless coders probe what
remains, and Monte-Carlo nulls turn observed compression rates into
significance statements.  Statistical tests (Ljung-Box, ADF, BDS) ride along
as the conventional baseline.
"""

__version__ = "0.1.0"
