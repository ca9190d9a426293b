"""Error types shared by all modules.

Every error names the module and operation it came from, plus the offending
datum, so a CLI report can be produced mechanically.
"""
from __future__ import annotations


class OrbidiskError(Exception):
    """Base class; carries (module, operation, message, datum)."""

    exit_code = 1

    def __init__(self, module: str, operation: str, message: str, datum=None):
        self.module = module
        self.operation = operation
        self.datum = datum
        super().__init__(f"[{module}/{operation}] {message}")

    def as_dict(self):
        d = {
            "module": self.module,
            "operation": self.operation,
            "message": str(self.args[0]),
        }
        if self.datum is not None:
            d["datum"] = repr(self.datum)
        return d


class ValidationError(OrbidiskError):
    """Malformed or inconsistent input data."""

    exit_code = 2


class ConsistencyError(OrbidiskError):
    """A mathematical cross-check failed (oracle mismatch, broken identity)."""

    exit_code = 3
