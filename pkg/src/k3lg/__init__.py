"""Quadratic spaces over Q, K3 lattice embeddings, Hodge structures of K3 type
and Frobenius data of compatible systems, with exact arithmetic throughout."""

__version__ = "0.1.0"
