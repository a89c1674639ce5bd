"""Exceptions raised by the geometry engine."""


class GeometryError(Exception):
    """Invalid geometry or unsupported geometric operation."""


class CrsError(GeometryError):
    """Operation applied in the wrong CRS (geographic where projected is
    required, or operands in different CRSs)."""


class WktParseError(GeometryError):
    """WKT text could not be parsed; carries the character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position
