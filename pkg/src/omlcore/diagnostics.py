"""Uniform diagnostic records emitted by checkers and validators."""

from __future__ import annotations

from dataclasses import dataclass

SEVERITIES = ("error", "warning", "info")


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    message: str
    location: tuple[str, int, int] | None = None

    def format(self) -> str:
        if self.location is not None:
            src, line, col = self.location
            where = "%s:%d:%d" % (src, line, col)
        else:
            where = "-"
        return "%s %s %s %s" % (self.severity.upper(), self.code, where, self.message)

    @property
    def sort_key(self):
        # document order first, then code; location-less entries sort by code alone
        loc = self.location if self.location is not None else ("", 0, 0)
        return (loc[0], loc[1], loc[2], self.code, self.message)


def sort_diagnostics(diags: list[Diagnostic]) -> list[Diagnostic]:
    return sorted(diags, key=lambda d: d.sort_key)


def has_errors(diags) -> bool:
    return any(d.severity == "error" for d in diags)


def from_error(err) -> Diagnostic:
    """Turn a raised OmlError into an error diagnostic."""
    return Diagnostic("error", err.code, err.message, err.location)
