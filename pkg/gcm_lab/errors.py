from __future__ import annotations


class GcmLabError(ValueError):
    """Base class for every error raised by the library."""


class ShapeError(GcmLabError):
    pass


class DomainError(GcmLabError):
    """Input violates the defining equation of the set it should belong to."""


class DegenerateSpectrumError(GcmLabError):
    pass


class SeriesError(GcmLabError):
    def __init__(self, message: str, order: int | None = None) -> None:
        super().__init__(message)
        self.order = order


class EvaluationError(GcmLabError):
    pass


class ConfigError(GcmLabError):
    def __init__(self, message: str, issues: list | None = None) -> None:
        super().__init__(message)
        self.issues = list(issues or [])


class UnknownLabelError(GcmLabError):
    def __init__(self, label: str, suggestions: list[str]) -> None:
        hint = f" Did you mean: {', '.join(suggestions)}?" if suggestions else ""
        super().__init__(f"Unknown label '{label}'.{hint}")
        self.label = label
        self.suggestions = suggestions
