"""Gray-level rendering of diagrams and CSV symbol codes.

Domain labels spread over light grays (domain 1 is white), breaks are
black, ambiguity is mid gray.  Raw diagrams render with 0 white and the
highest symbol black, matching the usual space-time convention.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ca import LabeledDiagram, SpaceTimeDiagram
from .transducer import Ambiguous, DomainBreak, DomainLabel, OutputSymbol


@dataclass(frozen=True)
class RenderPalette:
    domain_count: int

    def gray(self, symbol: OutputSymbol) -> int:
        if isinstance(symbol, DomainLabel):
            spread = 160 * (symbol.index - 1) // max(1, self.domain_count - 1)
            return 255 - spread
        if isinstance(symbol, DomainBreak):
            return 0
        if isinstance(symbol, Ambiguous):
            return 128
        raise ValueError(f"not an output symbol: {symbol!r}")


def emit_pgm(diagram: LabeledDiagram | SpaceTimeDiagram, palette: RenderPalette | None = None) -> bytes:
    """Plain (P2) PGM; byte-identical output for identical input."""
    if isinstance(diagram, LabeledDiagram):
        if palette is None:
            raise ValueError("labeled diagrams need a palette")
        grid = [[palette.gray(s) for s in row] for row in diagram.rows]
    else:
        top = diagram.k - 1
        grid = [[255 - v * 255 // top for v in row] for row in diagram.rows]
    height = len(grid)
    width = len(grid[0]) if grid else 0
    if not height or not width:
        raise ValueError("empty grid")
    lines = ["P2", f"{width} {height}", "255"]
    lines.extend(" ".join(str(v) for v in row) for row in grid)
    return ("\n".join(lines) + "\n").encode("ascii")


def parse_pgm(data: bytes) -> list[list[int]]:
    tokens = []
    for line in data.decode("ascii").splitlines():
        body = line.split("#", 1)[0]
        tokens.extend(body.split())
    if not tokens or tokens[0] != "P2":
        raise ValueError("not a plain PGM")
    width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    values = [int(v) for v in tokens[4:]]
    if len(values) != width * height:
        raise ValueError("pixel count mismatch")
    if any(v > maxval for v in values):
        raise ValueError("pixel exceeds maxval")
    return [values[r * width : (r + 1) * width] for r in range(height)]


def symbol_code(symbol: OutputSymbol, table: dict[tuple[int, int], int] | None = None) -> int:
    """Integer wire code: positive = domain index, 0 = ambiguity,
    negative = break code.  Without a break table every break maps to -1
    (break identity is not preserved for stack and two-pass outputs)."""
    if isinstance(symbol, DomainLabel):
        return symbol.index
    if isinstance(symbol, Ambiguous):
        return 0
    if isinstance(symbol, DomainBreak):
        if table is None:
            return -1
        return table.get((symbol.source, symbol.target), -1)
    raise ValueError(f"not an output symbol: {symbol!r}")
