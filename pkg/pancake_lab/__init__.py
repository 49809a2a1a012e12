"""
Stacked Pancake Lab
Desk-scale numerics for rotationally symmetric mean curvature flow:
glued pancake profiles, forced curve-shortening evolution, neck shooting
and barrier/monotonicity diagnostics.
"""
__version__ = "1.0.0"
