"""strace text parsing: events, fragments, literals, canonical rendering."""

from .literal import DecodedText, decode_text_literal, encode_text_literal
from .parser import ParseResult, parse_line, parse_stream
from .render import render_arg, render_event, render_ret
from .values import (
    MAX_TEXT_BYTES,
    Aggregate,
    ArgValue,
    CallForm,
    Err,
    ExitRecord,
    FlagSet,
    ListVal,
    Number,
    Ok,
    Opaque,
    ParsedLine,
    ResumedFragment,
    RetValue,
    SignalRecord,
    SyscallEvent,
    Text,
    TraceDiagnostic,
    UnfinishedFragment,
    Unknown,
    same_structure,
)

__all__ = [
    "MAX_TEXT_BYTES",
    "Aggregate",
    "ArgValue",
    "CallForm",
    "DecodedText",
    "Err",
    "ExitRecord",
    "FlagSet",
    "ListVal",
    "Number",
    "Ok",
    "Opaque",
    "ParseResult",
    "ParsedLine",
    "ResumedFragment",
    "RetValue",
    "SignalRecord",
    "SyscallEvent",
    "Text",
    "TraceDiagnostic",
    "UnfinishedFragment",
    "Unknown",
    "decode_text_literal",
    "encode_text_literal",
    "parse_line",
    "parse_stream",
    "render_arg",
    "render_event",
    "render_ret",
    "same_structure",
]
