"""Polynomial root finding by renormalized tangent Graeffe iteration."""
