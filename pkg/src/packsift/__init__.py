"""packsift: phased dynamic analysis of open-source packages.

Parses strace output into behavioral indicators (commands, files, IPs,
domains, syscall counts), applies rule-based and ML detection, and exposes
results through a JSON report, a job service, and a CLI.
"""

__version__ = "0.1.0"
