"""Exception hierarchy with machine-readable categories.

Every error carries a ``category`` string and an exit code used by the
command line front end. Library code raises the specific subclass; the CLI
maps it to a single-line error record on stderr.
"""

EXIT_CODES = {
    "syntax": 2,
    "schema": 3,
    "physics": 4,
    "domain": 5,
    "dimension": 6,
    "ordering": 7,
    "numeric": 8,
    "model": 9,
    "io": 10,
}


class ErgofluxError(Exception):
    """Base class; ``category`` selects the CLI exit code."""

    category = "domain"

    @property
    def exit_code(self) -> int:
        return EXIT_CODES.get(self.category, 1)


class DomainError(ErgofluxError):
    """Input outside the physically or mathematically valid domain."""

    category = "domain"


class DimensionError(ErgofluxError):
    """Mismatched or unsupported matrix / vector dimensions."""

    category = "dimension"


class OrderingError(ErgofluxError):
    """Violated ordering precondition (e.g. ambiguous initial ordering)."""

    category = "ordering"


class NumericError(ErgofluxError):
    """Numerical backend failure (eigensolver, conditioning)."""

    category = "numeric"


class ModelError(ErgofluxError):
    """Request incompatible with the dynamical model (e.g. no generator)."""

    category = "model"


class ConfigError(ErgofluxError):
    """Run-configuration problem; ``kind`` is syntax, schema or physics."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        if kind not in ("syntax", "schema", "physics"):
            raise ValueError(f"unknown config error kind: {kind}")
        self.kind = kind

    @property
    def category(self) -> str:  # type: ignore[override]
        return self.kind
