"""Coupled-admittance simulation of FD, hybrid and DMA massive-MIMO downlinks."""
__version__ = "0.1.0"
