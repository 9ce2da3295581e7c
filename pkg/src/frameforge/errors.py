"""Exception hierarchy shared by every frameforge module."""


class FrameForgeError(Exception):
    """Base class for all frameforge errors."""


class DegenerateInput(FrameForgeError):
    """Vectors handed to Gram-Schmidt are (numerically) linearly dependent."""


class BadParameter(FrameForgeError, ValueError):
    pass


class OutOfDomain(FrameForgeError, ValueError):
    pass


class NotImmersed(FrameForgeError):
    """The chart tangents collapse: x_u1 and x_u2 are not independent."""


class UnsupportedSpec(FrameForgeError):
    pass


class SingularCoframe(FrameForgeError):
    pass


class ClassificationError(FrameForgeError):
    """Raised when the classification algorithm meets data it cannot reconcile."""


class InconsistentConstants(ClassificationError):
    pass


class NotConstantCenter(ClassificationError):
    pass


class PlaneDrift(ClassificationError):
    pass


class NotPrincipalChart(ClassificationError):
    """The chart lines are not curvature lines, so the circle tracing cannot run."""


class PoleCollisionWarning(UserWarning):
    pass
