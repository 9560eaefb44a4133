"""Exception types shared across the kernel."""


class GfoError(Exception):
    """Base class for all kernel errors."""


class ZeroOrNegativeDuration(GfoError):
    """A chronoid (or restriction) would have no duration."""


class NotASubinterval(GfoError):
    """Requested bounds do not fall inside the host interval."""


class OutOfExtent(GfoError):
    """A coordinate lies outside a process extent or chronoid."""


class OutOfLifetime(GfoError):
    """A coordinate lies outside a continuant's lifetime."""


class UnsampledTime(GfoError):
    """The coordinate is inside the extent but carries no declared sample."""


class UnknownEntity(GfoError):
    """No entity with the given id exists in the model."""


class UnknownProperty(GfoError):
    """No property definition with the given name exists (or none applies here)."""


class UnknownSituation(GfoError):
    """The situation is not part of the model."""


class MalformedContinuant(GfoError):
    """The continuant's exhibit map is unusable (endpoint samples missing)."""


class MalformedTriple(GfoError):
    """A truth-maker triple violates foundedness or constituenthood."""
