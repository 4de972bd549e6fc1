from __future__ import annotations

import io
import math
from dataclasses import dataclass, field


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    if isinstance(value, float) or hasattr(value, "dtype"):
        v = float(value)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(value)


@dataclass
class CsvTable:
    header: list[str]
    rows: list[list] = field(default_factory=list)

    def add(self, **cells) -> None:
        unknown = set(cells) - set(self.header)
        if unknown:
            raise KeyError(f"unknown columns {sorted(unknown)}")
        self.rows.append([cells.get(h) for h in self.header])

    def column(self, name: str) -> list:
        i = self.header.index(name)
        return [r[i] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.header) + "\n")
        for r in self.rows:
            buf.write(",".join(format_cell(c) for c in r) + "\n")
        return buf.getvalue()

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())


def orders(errors: list[float], ratios: list[float]) -> list[float | None]:
    """log(e_k / e_{k+1}) / log(r_k) between consecutive rows; first entry blank."""
    out: list[float | None] = [None]
    for k in range(1, len(errors)):
        e0, e1, r = errors[k - 1], errors[k], ratios[k - 1]
        if e0 > 0 and e1 > 0 and r > 0 and r != 1:
            out.append(math.log(e0 / e1) / math.log(r))
        else:
            out.append(None)
    return out
