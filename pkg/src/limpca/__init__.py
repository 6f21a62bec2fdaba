"""Arithmetical-hierarchy transforms, partial combinatory algebras, limiting
towers, and realizer synthesis for classical arithmetic."""

__version__ = "0.1.0"
