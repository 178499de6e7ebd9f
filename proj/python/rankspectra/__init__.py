"""Spectra of high-dimensional rank correlation matrices."""

from ._rankspectra import *  # noqa: F401,F403
from ._rankspectra import (  # noqa: F401
    ComputationError,
    IoError,
    RankSpectraError,
    ValidationError,
    __version__,
)

STATISTICS = ("hoeffding-d", "bkr-r", "bdy-taustar")
