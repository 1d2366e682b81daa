"""Equipotential circles in convex bodies."""
