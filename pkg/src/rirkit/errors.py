"""Exception types shared across the package."""


class RirkitError(Exception):
    """Base class for all rirkit errors."""


class ConfigurationError(RirkitError):
    """A scene, room, or render configuration is invalid."""


class DegeneratePathError(RirkitError):
    """An image source coincides with the microphone (zero-length path)."""


class DegenerateAnchorError(RirkitError):
    """Anchor points do not define a usable coordinate frame."""


class PatternError(RirkitError):
    """A directivity pattern payload or evaluation request is invalid."""
