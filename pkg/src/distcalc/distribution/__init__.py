"""Tempered distributions: atoms, algebra, pairing and numerical checks."""

from .core import *  # noqa: F401,F403
from .core import __all__ as _core_all
from .checks import *  # noqa: F401,F403
from .checks import __all__ as _checks_all

__all__ = [*_core_all, *_checks_all]
