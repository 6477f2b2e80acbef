"""Flat CSV cache of class-group data for fundamental discriminants."""

from __future__ import annotations

import csv
import io
import os
import random
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .classgroups import ClassGroupData, class_group, fundamental_discriminants

FIELDS = ["D", "h", "h3", "rank3", "factors"]


class CacheError(ValueError):
    def __init__(self, path, lineno: int | None, reason: str):
        where = f"{path}:{lineno}" if lineno else str(path)
        super().__init__(f"{where}: {reason}")
        self.lineno = lineno


def _row(g: ClassGroupData) -> list:
    return [g.discriminant, g.h, g.h3, g.rank3, "x".join(map(str, g.cyclic_factors))]


def _parse(path, lineno: int, rec: dict) -> ClassGroupData:
    try:
        factors = tuple(int(x) for x in rec["factors"].split("x"))
        return ClassGroupData(int(rec["D"]), int(rec["h"]), factors, int(rec["h3"]), int(rec["rank3"]))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise CacheError(path, lineno, f"malformed row: {exc}") from None


def _groups(ds: np.ndarray) -> list[ClassGroupData]:
    return [class_group(int(d)) for d in ds]


def compute(max_abs: int, workers: int = 1) -> list[ClassGroupData]:
    """Class groups of every fundamental discriminant with 0 < |D| <= max_abs, sorted by D."""
    ds = fundamental_discriminants(-max_abs, max_abs)
    if workers <= 1:
        return _groups(ds)
    parts = [c for c in np.array_split(ds, 8 * workers) if len(c)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return [g for part in ex.map(_groups, parts) for g in part]


def render(groups: list[ClassGroupData]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for g in sorted(groups, key=lambda g: g.discriminant):
        w.writerow(_row(g))
    return buf.getvalue()


class ClassGroupCache:
    """CSV file with header D,h,h3,rank3,factors, one row per discriminant, sorted by D."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def rows(self) -> list[ClassGroupData]:
        """All rows in file order (duplicates kept); structural checks on every row."""
        if not self.path.exists():
            return []
        with self.path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != FIELDS:
                raise CacheError(self.path, 1, f"header must be {','.join(FIELDS)}")
            return [_parse(self.path, i, rec) for i, rec in enumerate(reader, start=2)]

    def load(self) -> dict[int, ClassGroupData]:
        out: dict[int, ClassGroupData] = {}
        for g in self.rows():
            prev = out.get(g.discriminant)
            if prev is not None and prev != g:
                raise CacheError(self.path, None, f"conflicting rows for D = {g.discriminant}")
            out[g.discriminant] = g
        return out

    def _write(self, text: str) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=self.path.name, suffix=".tmp")
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, self.path)

    def build(self, max_abs: int, workers: int = 1) -> int:
        groups = compute(max_abs, workers)
        self._write(render(groups))
        return len(groups)

    def vacuum(self) -> int:
        """Drop duplicate rows and restore sort order; returns the number of rows removed."""
        rows = self.rows()
        unique = self.load()
        self._write(render(list(unique.values())))
        return len(rows) - len(unique)

    def stats(self) -> dict:
        rows = self.rows()
        ds = [g.discriminant for g in rows]
        uniq = set(ds)
        return {
            "rows": len(rows),
            "unique": len(uniq),
            "duplicates": len(rows) - len(uniq),
            "imaginary": sum(1 for d in uniq if d < 0),
            "real": sum(1 for d in uniq if d > 0),
            "max_abs": max((abs(d) for d in uniq), default=0),
            "sorted": ds == sorted(ds),
        }

    def verify(self, sample: int = 100, seed: int = 0) -> list[int]:
        """Re-derive a random sample of rows; returns discriminants whose stored data is wrong."""
        rows = list(self.load().values())
        rng = random.Random(seed)
        picked = rows if len(rows) <= sample else rng.sample(rows, sample)
        return sorted(g.discriminant for g in picked if class_group(g.discriminant) != g)
