"""Behavioral indicator extraction from parsed syscall event streams."""

from .dns import DnsQuestion, decode_dns_queries, encode_dns_query
from .extract import (
    DEFAULT_SECTION_CAP,
    KEEP_EVERYTHING,
    NoiseFilter,
    build_phase_report,
    extract_commands,
    extract_domains,
    extract_files,
    extract_network,
    extract_syscall_stats,
)
from .records import (
    FILE_OPERATIONS,
    PHASES,
    CommandRecord,
    DomainRecord,
    FileRecord,
    NetworkEndpoint,
    PhaseReport,
    SyscallStats,
)
from .sockets import Endpoint, SocketInfo, SocketTable, parse_sockaddr, track_sockets

__all__ = [
    "DEFAULT_SECTION_CAP",
    "FILE_OPERATIONS",
    "KEEP_EVERYTHING",
    "PHASES",
    "CommandRecord",
    "DnsQuestion",
    "DomainRecord",
    "Endpoint",
    "FileRecord",
    "NetworkEndpoint",
    "NoiseFilter",
    "PhaseReport",
    "SocketInfo",
    "SocketTable",
    "SyscallStats",
    "build_phase_report",
    "decode_dns_queries",
    "encode_dns_query",
    "extract_commands",
    "extract_domains",
    "extract_files",
    "extract_network",
    "extract_syscall_stats",
    "parse_sockaddr",
    "track_sockets",
]
