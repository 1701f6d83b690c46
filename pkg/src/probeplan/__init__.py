"""Trajectory planning for an articulated two-link probe in the plane.

A probe consisting of a long straight link and a short end link of length
``r`` is inserted along a straight line into a circular workspace and then
rotated so the end link reaches a target point among polygonal obstacles.
The package computes whether a given final pose admits a collision-free
motion, the minimum end-link length that makes the target reachable, the
full set of reachable lengths, and the feasible region in the space of
(insertion angle, link angle) configurations.
"""

__version__ = "0.1.0"
