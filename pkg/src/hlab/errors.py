"""Exception types shared across the package."""


class HlabError(Exception):
    """Base class for all hlab errors."""


class ParseError(HlabError):
    """A file could not be parsed.

    Carries the 1-based line number and, when available, the byte offset
    of the offending location.
    """

    def __init__(self, message, line=None, offset=None):
        self.line = line
        self.offset = offset
        parts = [message]
        if line is not None:
            parts.append(f"(line {line})")
        if offset is not None:
            parts.append(f"(byte offset {offset})")
        super().__init__(" ".join(parts))


class SpecError(HlabError):
    """A learner or method specification is invalid."""


class ProvenanceError(HlabError):
    """A cached artifact does not match the data it is applied to."""


class FilterError(HlabError):
    """Hardness filtering would produce an unusable dataset."""


class ConfigError(HlabError):
    """An experiment configuration failed validation."""
