"""Offline transferable digital euro: library, parties and benchmark harness."""

__version__ = "0.1.0"

from .core import (
    load_group,
    generate_crs,
    DigitalEuro,
    TransferBundle,
    receive_verify,
    spend,
)

__all__ = [
    'load_group',
    'generate_crs',
    'DigitalEuro',
    'TransferBundle',
    'receive_verify',
    'spend'
]
