"""
Schemes supported by kdvexp.
"""

from .expint1 import ExpInt1
from .expint2 import ExpInt2

__all__ = [
    "ExpInt1",
    "ExpInt2",
]
