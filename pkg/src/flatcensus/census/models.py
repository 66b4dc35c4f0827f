"""
Data models for census results and work units.

All counts are exact ``Fraction`` values; nothing in a CountTable is ever a float.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, Optional

from ..asymptotics import AsymConstant, Provenance, surface_exponent
from ..curve_type import TopType
from ..exceptions import CensusIncompleteError

BucketKey = tuple[int, str, str]


def _key(value: TopType | str) -> str:
    return value.key if isinstance(value, TopType) else value


@dataclass(frozen=True)
class CensusFilter:
    """Restrictions on the horizontal structure of enumerated surfaces"""
    single_cylinder: bool = False
    unit_height: bool = False
    h_types: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "h_types", frozenset(_key(t) for t in self.h_types))

    @property
    def single_row(self) -> bool:
        """One cylinder of height one is exactly a horizontal gluing with one row."""
        return self.single_cylinder and self.unit_height

    @property
    def is_trivial(self) -> bool:
        return not (self.single_cylinder or self.unit_height or self.h_types)

    def accepts_cylinders(self, shapes: Iterable[tuple[int, int]]) -> bool:
        shapes = list(shapes)
        if self.single_cylinder and len(shapes) != 1:
            return False
        if self.unit_height and any(height != 1 for _, height in shapes):
            return False
        return True

    def accepts_rows(self, row_lengths: Iterable[int]) -> bool:
        """Necessary condition on the horizontal rows, checked before any vertical gluing.

        A cylinder of height h is h stacked rows of its circumference, so a
        single cylinder needs rows of one common length.
        """
        lengths = list(row_lengths)
        if self.single_row:
            return len(lengths) == 1
        if self.single_cylinder:
            return len(set(lengths)) == 1
        return True

    def accepts_h_type(self, h_type: TopType | str) -> bool:
        return not self.h_types or _key(h_type) in self.h_types

    def to_dict(self) -> Dict[str, Any]:
        return {
            "single_cylinder": self.single_cylinder,
            "unit_height": self.unit_height,
            "h_types": sorted(self.h_types),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CensusFilter':
        return cls(
            single_cylinder=bool(data.get("single_cylinder", False)),
            unit_height=bool(data.get("unit_height", False)),
            h_types=frozenset(data.get("h_types", ())),
        )


@dataclass(frozen=True)
class ShardSpec:
    """One unit of census work: a horizontal gluing and, for the pruned mode, the partner of vertical slot 0."""
    mode: str
    area: int
    h_index: int
    v_head: Optional[int] = None

    @property
    def name(self) -> str:
        head = "all" if self.v_head is None else str(self.v_head)
        return f"{self.mode}-N{self.area}-h{self.h_index}-v{head}"

    def to_dict(self) -> Dict[str, Any]:
        return {"mode": self.mode, "area": self.area, "h_index": self.h_index, "v_head": self.v_head}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ShardSpec':
        return cls(
            mode=str(data["mode"]),
            area=int(data["area"]),
            h_index=int(data["h_index"]),
            v_head=None if data.get("v_head") is None else int(data["v_head"]),
        )


@dataclass
class ShardResult:
    spec: ShardSpec
    counts: Dict[tuple[str, str], Fraction] = field(default_factory=dict)
    examined: int = 0

    def add(self, h_type: str, v_type: str, weight: Fraction) -> None:
        key = (h_type, v_type)
        self.counts[key] = self.counts.get(key, Fraction(0)) + weight

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spec": self.spec.to_dict(),
            "examined": self.examined,
            "counts": [
                {"h_type": h, "v_type": v, "count_num": c.numerator, "count_den": c.denominator}
                for (h, v), c in sorted(self.counts.items())
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ShardResult':
        result = cls(spec=ShardSpec.from_dict(data["spec"]), examined=int(data.get("examined", 0)))
        for row in data.get("counts", []):
            result.add(row["h_type"], row["v_type"], Fraction(int(row["count_num"]), int(row["count_den"])))
        return result


@dataclass
class CountTable:
    """Weighted counts indexed by (area, horizontal type, vertical type).

    ``complete_area`` is the largest L for which every area <= L has been
    enumerated in full.
    """
    g: int
    n: int
    counts: Dict[BucketKey, Fraction] = field(default_factory=dict)
    complete_area: int = 0

    def add(self, area: int, h_type: TopType | str, v_type: TopType | str, weight: Fraction) -> None:
        if weight == 0:
            return
        key = (area, _key(h_type), _key(v_type))
        self.counts[key] = self.counts.get(key, Fraction(0)) + weight

    def add_shard(self, result: ShardResult) -> None:
        for (h_type, v_type), weight in result.counts.items():
            self.add(result.spec.area, h_type, v_type, weight)

    def merge(self, other: 'CountTable') -> 'CountTable':
        if (other.g, other.n) != (self.g, self.n):
            raise ValueError(f"Cannot merge census of (g={other.g}, n={other.n}) into (g={self.g}, n={self.n})")
        for (area, h_type, v_type), weight in other.counts.items():
            self.add(area, h_type, v_type, weight)
        return self

    def _within(self, max_area: Optional[int]):
        for (area, h_type, v_type), weight in self.counts.items():
            if max_area is None or area <= max_area:
                yield area, h_type, v_type, weight

    def total(self, max_area: Optional[int] = None) -> Fraction:
        return sum((w for *_, w in self._within(max_area)), Fraction(0))

    def marginals(self, max_area: Optional[int] = None) -> Dict[str, Fraction]:
        """Counts summed over vertical types, keyed by horizontal type."""
        result: Dict[str, Fraction] = {}
        for _, h_type, _, weight in self._within(max_area):
            result[h_type] = result.get(h_type, Fraction(0)) + weight
        return result

    def h_types(self) -> list[str]:
        return sorted({h for _, h, _ in self.counts})

    def swapped(self) -> 'CountTable':
        """The same census with horizontal and vertical roles exchanged."""
        table = CountTable(self.g, self.n, complete_area=self.complete_area)
        for (area, h_type, v_type), weight in self.counts.items():
            table.add(area, v_type, h_type, weight)
        return table

    def rows(self) -> list[tuple[int, str, str, Fraction]]:
        return [(area, h, v, self.counts[(area, h, v)]) for area, h, v in sorted(self.counts)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CountTable):
            return NotImplemented
        return (self.g, self.n, self.counts) == (other.g, other.n, other.counts)


def _require_complete(ct: CountTable, L: int) -> None:
    """An empty census counts zero at every L; a non-empty one only up to its complete area."""
    if not ct.counts:
        return
    if L > ct.complete_area:
        raise CensusIncompleteError(requested=L, available=ct.complete_area)


def s_value(ct: CountTable, h_type: TopType | str, v_type: Optional[TopType | str], L: int) -> Fraction:
    """Weighted count of surfaces of area <= L with the given types; ``v_type=None`` sums over all."""
    _require_complete(ct, L)
    h_key = _key(h_type)
    v_key = None if v_type is None else _key(v_type)
    return sum(
        (w for _, h, v, w in ct._within(L) if h == h_key and (v_key is None or v == v_key)),
        Fraction(0),
    )


def mgn_estimate(ct: CountTable, L: int, exponent: Optional[int] = None) -> Fraction:
    """Total weighted count up to L divided by L**exponent (default 12g - 12 + 4n)."""
    _require_complete(ct, L)
    if exponent is None:
        exponent = 12 * ct.g - 12 + 4 * ct.n
    return ct.total(L) / Fraction(L) ** exponent


def empirical_b(ct: CountTable, L: int) -> AsymConstant:
    """Raw census estimate of the b-constant, 2**(2g-3+n) times the m-estimate."""
    value = mgn_estimate(ct, L) * 2 ** surface_exponent(ct.g, ct.n)
    return AsymConstant(rational=value, provenance=Provenance.EMPIRICAL)
