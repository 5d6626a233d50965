class CodecError(Exception):
    """Base class for codec failures."""


class FormatError(CodecError):
    """Input file or stream header is not in a supported format."""


class CorruptStreamError(CodecError):
    """Stream payload carries a value that cannot occur in a valid stream."""


class TruncatedStreamError(CorruptStreamError):
    """Stream payload ends before all announced blocks were read."""
