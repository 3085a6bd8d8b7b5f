"""Tempered distributions on the real line: Schwartz test functions, a catalog of
slowly growing functions, exact symbolic rewriting of derivatives and Fourier
transforms, and certified numerical pairing."""

from . import catalog, integrate, schwartz
from .distribution import (Distribution, delta, derivative, fourier, pair, pair_detailed,
                           regular, translate)
from .dsl import elaborate, format_distribution, format_expr, parse_expr, testfn
from .errors import DistCalcError
from .schwartz import TestFunction, bump, gauss, polygauss, seminorm

__all__ = ["catalog", "integrate", "schwartz", "Distribution", "delta", "derivative", "fourier",
           "pair", "pair_detailed", "regular", "translate", "elaborate", "format_distribution",
           "format_expr", "parse_expr", "testfn", "DistCalcError", "TestFunction", "bump", "gauss",
           "polygauss", "seminorm"]
