"""Exception types shared across the package."""


class CsvParseError(ValueError):
    """Malformed point-cloud CSV; carries the 1-based offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DisconnectedGraphError(RuntimeError):
    """Neighbor graph has more than one connected component."""

    def __init__(self, n_components: int):
        self.n_components = n_components
        super().__init__(
            f"neighbor graph has {n_components} connected components; "
            "geodesic distances need a connected graph - increase k, or pass "
            "restrict_to_largest=True to embed the largest component only"
        )


class NumericalError(RuntimeError):
    """An eigen/linear solve produced an unusable result."""
