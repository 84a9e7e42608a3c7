"""Exception hierarchy shared by every rdcache module."""


class RdCacheError(Exception):
    """Base class for all errors raised by rdcache."""


class ConfigError(RdCacheError, ValueError):
    """Invalid cache configuration, design space, or generator parameters."""


class TraceFormatError(RdCacheError, ValueError):
    """A trace source could not be decoded."""


class TraceParseError(TraceFormatError):
    def __init__(self, lineno, text, reason="malformed hexadecimal address"):
        self.lineno = lineno
        self.text = text
        super().__init__(f"line {lineno}: {reason}: {text!r}")


class TruncatedTraceError(TraceFormatError):
    pass


class DocumentError(RdCacheError, ValueError):
    """A persisted document does not match its schema."""


class UndefinedRatioError(RdCacheError, ZeroDivisionError):
    pass


class EmptyInputError(RdCacheError, ValueError):
    pass
