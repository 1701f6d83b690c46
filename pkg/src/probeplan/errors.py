"""Exception types shared across the package."""


class ProbeplanError(Exception):
    """Base class for all probeplan-specific errors."""


class ParseError(ProbeplanError):
    """Scene or trajectory input could not be parsed."""


class ValidationError(ProbeplanError):
    """Input parsed but violates a model invariant."""


class EmptyScene(ProbeplanError):
    """An operation that needs at least one obstacle got none."""


class GenerationFailed(ProbeplanError):
    """Random scene generation exhausted its retry budget."""


class ForbiddenPair(ProbeplanError):
    """(theta_S, theta_C) outside the reachable rotation band."""


class PointInsideCircle(ProbeplanError):
    """Tangent construction from a point strictly inside the circle."""


class DegenerateLine(ProbeplanError):
    """Two coincident points cannot define a line."""


class InvalidSector(ProbeplanError):
    """Circular sector violates its invariants (sweep, arc-at-target)."""


class NoFeasiblePoint(ProbeplanError):
    """A shooting query found no admissible point within the workspace."""


class PlannerError(ProbeplanError):
    """Internal planner cross-check failed (witness did not re-verify)."""
