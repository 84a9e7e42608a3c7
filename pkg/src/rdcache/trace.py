"""Memory trace ingestion.

Two on-disk formats are supported:

``text-hex``
    UTF-8, one hexadecimal address per line (``0x`` prefix optional).
    Lines starting with ``#`` and blank lines are skipped.
``binary-le64``
    Raw little-endian unsigned 64-bit words with no header.

Addresses are byte addresses on disk; :func:`to_line_trace` maps them to
cache-line indices, which is the unit every other module works in.
"""

from __future__ import annotations

import io
import struct
from array import array
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Sequence

from .errors import ConfigError, TraceParseError, TruncatedTraceError

FORMATS = ("text-hex", "binary-le64")
DEFAULT_LINE_SIZE = 64
ADDRESS_LIMIT = 1 << 64

_WORD = struct.Struct("<Q")


def is_power_of_two(value: int) -> bool:
    return isinstance(value, int) and value >= 1 and value & (value - 1) == 0


def check_line_size(line_size_bytes: int) -> int:
    if not is_power_of_two(line_size_bytes):
        raise ConfigError(f"line size must be a power of 2, got {line_size_bytes!r}")
    return line_size_bytes


@dataclass(frozen=True)
class AccessTrace:
    """Line-granularity access sequence of one application, in program order."""

    app_id: str
    accesses: tuple[int, ...]
    line_size_bytes: int = DEFAULT_LINE_SIZE

    def __post_init__(self):
        check_line_size(self.line_size_bytes)
        if not isinstance(self.accesses, tuple):
            object.__setattr__(self, "accesses", tuple(self.accesses))

    def __len__(self):
        return len(self.accesses)

    def __iter__(self):
        return iter(self.accesses)

    def footprint(self) -> int:
        return len(set(self.accesses))


def _parse_text(data: bytes) -> list[int]:
    out = []
    text = data.decode("utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        digits = line[2:] if line[:2].lower() == "0x" else line
        # int(x, 16) tolerates underscores and signs; the format does not.
        if not digits or any(ch not in "0123456789abcdefABCDEF" for ch in digits):
            raise TraceParseError(lineno, raw)
        value = int(digits, 16)
        if value >= ADDRESS_LIMIT:
            raise TraceParseError(lineno, raw, "address does not fit in 64 bits")
        out.append(value)
    return out


def _parse_binary(data: bytes) -> list[int]:
    if len(data) % 8:
        raise TruncatedTraceError(
            f"binary trace length {len(data)} is not a multiple of 8 bytes"
        )
    words = array("Q")
    if words.itemsize != 8:  # pragma: no cover - exotic platforms
        return [w for (w,) in _WORD.iter_unpack(data)]
    words.frombytes(data)
    if struct.pack("=I", 1) != struct.pack("<I", 1):  # pragma: no cover
        words.byteswap()
    return words.tolist()


def parse_trace(source: bytes | BinaryIO, format: str = "text-hex") -> list[int]:
    """Decode a trace into its byte-address sequence, preserving source order.

    ``source`` may be raw bytes or a binary file object.
    """
    data = source if isinstance(source, (bytes, bytearray)) else source.read()
    if format == "text-hex":
        return _parse_text(bytes(data))
    if format == "binary-le64":
        return _parse_binary(bytes(data))
    raise ConfigError(f"unknown trace format {format!r}; expected one of {FORMATS}")


def to_line_trace(
    addresses: Iterable[int],
    line_size_bytes: int = DEFAULT_LINE_SIZE,
    app_id: str = "app",
) -> AccessTrace:
    check_line_size(line_size_bytes)
    shift = line_size_bytes.bit_length() - 1
    return AccessTrace(app_id, tuple(a >> shift for a in addresses), line_size_bytes)


def read_trace(
    path, format: str = "text-hex", line_size_bytes: int = DEFAULT_LINE_SIZE, app_id=None
) -> AccessTrace:
    with open(path, "rb") as fh:
        addresses = parse_trace(fh, format)
    if app_id is None:
        app_id = _stem(path)
    return to_line_trace(addresses, line_size_bytes, app_id)


def _stem(path) -> str:
    name = str(path).replace("\\", "/").rsplit("/", 1)[-1]
    return name.split(".", 1)[0] or "app"


def format_addresses(addresses: Sequence[int], format: str = "text-hex") -> bytes:
    """Encode byte addresses in one of the trace formats (inverse of parse_trace)."""
    for a in addresses:
        if not 0 <= a < ADDRESS_LIMIT:
            raise ConfigError(f"address {a:#x} does not fit in 64 bits")
    if format == "text-hex":
        buf = io.StringIO()
        for a in addresses:
            buf.write(f"{a:#x}\n")
        return buf.getvalue().encode("utf-8")
    if format == "binary-le64":
        words = array("Q", addresses)
        if struct.pack("=I", 1) != struct.pack("<I", 1):  # pragma: no cover
            words.byteswap()
        return words.tobytes()
    raise ConfigError(f"unknown trace format {format!r}; expected one of {FORMATS}")


def line_trace_bytes(trace: AccessTrace, format: str = "text-hex") -> bytes:
    """Serialize a line trace as byte addresses (line index times line size).

    Line indices at or above ``2**64 / line_size`` cannot be represented and
    are rejected.
    """
    limit = ADDRESS_LIMIT // trace.line_size_bytes
    for line in trace.accesses:
        if line >= limit:
            raise ConfigError(
                f"line address {line:#x} overflows 64 bits at line size {trace.line_size_bytes}"
            )
    return format_addresses([a * trace.line_size_bytes for a in trace.accesses], format)


def write_trace(path, trace: AccessTrace, format: str = "text-hex") -> None:
    with open(path, "wb") as fh:
        fh.write(line_trace_bytes(trace, format))
