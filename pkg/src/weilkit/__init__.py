"""Exact computer algebra for Weil algebras, Clifford and enveloping algebras,
Cartan models of equivariant cohomology and the Duflo map."""

__version__ = "0.1.0"
