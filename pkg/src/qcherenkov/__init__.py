"""Phase-space description of quantum Cherenkov radiation from an electron packet."""

__version__ = "0.1.0"
