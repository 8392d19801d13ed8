"""Curvature-bound checks built on the K-quadrilateral cosine."""
