"""
Substructural typing protocols for kdvexp.

These are, generally speaking, an implementation detail.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Protocol

if TYPE_CHECKING:
    from kdvexp.spectral import Grid, SpectralField  # pragma: no cover


class GridProtocol(Protocol):
    @property
    def grid(self) -> Grid:
        ...  # pragma: no cover


class StepProtocol(Protocol):
    def __call__(self, u: SpectralField, tau: float, *, alpha: float = 0.0) -> SpectralField:
        ...  # pragma: no cover
