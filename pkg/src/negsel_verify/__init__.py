"""Partition a safety requirement's input box, propose unsafe cells with
real-valued negative selection, and check them with a small complete
ReLU-network verifier."""

__version__ = "0.1.0"
