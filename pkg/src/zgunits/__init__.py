"""Exact-arithmetic constraint engine for torsion units of order 2p in
integral group rings of PSL(2,q) and PGL(2,q)."""

__version__ = "0.1.0"
