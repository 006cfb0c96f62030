"""Frequency bands and the cluster-wide DFR spectrum partition.

A cluster owns six base bands laid out along the frequency axis in the order
``m1, X, m2, Y, m3, Z``: one band per macrocell and one femto-only guard band
between each pair of macro bands.  Everything a femtocell may be handed
(half of ``X``, the ``m4/m5/m6`` thirds of a neighbour pool, an even slice of a
pool) is a :class:`BandSet`, a union of rational sub-intervals of base bands.
Because the sub-intervals are stored as exact fractions of a named base band,
overlap between any two band sets is decided exactly, without comparing
floating point frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

MACRO_NAMES = ("m1", "m2", "m3")
GUARD_NAMES = ("X", "Y", "Z")
AXIS_ORDER = ("m1", "X", "m2", "Y", "m3", "Z")

# m1 -> m2 -> m3 -> m1, X -> Y -> Z -> X
ROTATION = {"m1": "m2", "m2": "m3", "m3": "m1", "X": "Y", "Y": "Z", "Z": "X"}

_AXIS_INDEX = {name: i for i, name in enumerate(AXIS_ORDER)}


def _check_macro(serving_macro: int) -> None:
    if serving_macro not in (1, 2, 3):
        raise ValueError(f"macro index must be 1, 2 or 3, got {serving_macro!r}")


def _rotate_name(name: str, steps: int) -> str:
    for _ in range(steps % 3):
        name = ROTATION[name]
    return name


@dataclass(frozen=True)
class Band:
    """A named contiguous frequency interval ``[low_hz, low_hz + width_hz)``."""

    name: str
    low_hz: float
    width_hz: float

    def __post_init__(self):
        if not self.width_hz > 0:
            raise ValueError(f"band {self.name!r}: width must be > 0, got {self.width_hz!r}")

    @property
    def high_hz(self) -> float:
        return self.low_hz + self.width_hz


@dataclass(frozen=True, order=True)
class Segment:
    """The part ``[start, stop)`` of base band ``base``, as fractions of its width."""

    base: str
    start: Fraction
    stop: Fraction

    def __post_init__(self):
        if self.base not in _AXIS_INDEX:
            raise ValueError(f"unknown base band {self.base!r}")
        if not 0 <= self.start < self.stop <= 1:
            raise ValueError(f"bad segment bounds [{self.start}, {self.stop}) on {self.base}")

    @property
    def label(self) -> str:
        if self.start == 0 and self.stop == 1:
            return self.base
        return f"{self.base}[{self.start}:{self.stop}]"


def _normalize(segments: Iterable[Segment]) -> tuple[Segment, ...]:
    ordered = sorted(segments, key=lambda s: (_AXIS_INDEX[s.base], s.start, s.stop))
    merged: list[Segment] = []
    for seg in ordered:
        if merged and merged[-1].base == seg.base and seg.start <= merged[-1].stop:
            last = merged[-1]
            merged[-1] = Segment(last.base, last.start, max(last.stop, seg.stop))
        else:
            merged.append(seg)
    return tuple(merged)


class BandSet:
    """Immutable union of base-band segments with exact set algebra."""

    __slots__ = ("segments", "_hash")

    def __init__(self, segments: Iterable[Segment] = ()):
        object.__setattr__(self, "segments", _normalize(segments))
        object.__setattr__(self, "_hash", hash(self.segments))

    def __setattr__(self, name, value):
        raise AttributeError("BandSet is immutable")

    @classmethod
    def of(cls, *names: str) -> "BandSet":
        """Union of whole base bands."""
        return cls(Segment(n, Fraction(0), Fraction(1)) for n in names)

    @classmethod
    def part(cls, base: str, start, stop) -> "BandSet":
        return cls([Segment(base, Fraction(start), Fraction(stop))])

    def __eq__(self, other):
        if not isinstance(other, BandSet):
            return NotImplemented
        return self.segments == other.segments

    def __hash__(self):
        return self._hash

    def __bool__(self):
        return bool(self.segments)

    def __repr__(self):
        return f"BandSet({self.label or '{}'})"

    @property
    def label(self) -> str:
        return "+".join(s.label for s in self.segments)

    @property
    def bases(self) -> frozenset[str]:
        return frozenset(s.base for s in self.segments)

    def __or__(self, other: "BandSet") -> "BandSet":
        return BandSet(self.segments + other.segments)

    def __and__(self, other: "BandSet") -> "BandSet":
        out = []
        for a in self.segments:
            for b in other.segments:
                if a.base != b.base:
                    continue
                lo, hi = max(a.start, b.start), min(a.stop, b.stop)
                if lo < hi:
                    out.append(Segment(a.base, lo, hi))
        return BandSet(out)

    def __sub__(self, other: "BandSet") -> "BandSet":
        out = []
        for a in self.segments:
            pieces = [(a.start, a.stop)]
            for b in other.segments:
                if b.base != a.base:
                    continue
                nxt = []
                for lo, hi in pieces:
                    if b.stop <= lo or b.start >= hi:
                        nxt.append((lo, hi))
                        continue
                    if lo < b.start:
                        nxt.append((lo, b.start))
                    if b.stop < hi:
                        nxt.append((b.stop, hi))
                pieces = nxt
            out.extend(Segment(a.base, lo, hi) for lo, hi in pieces)
        return BandSet(out)

    def isdisjoint(self, other: "BandSet") -> bool:
        return not (self & other)

    def issubset(self, other: "BandSet") -> bool:
        return not (self - other)

    def relabel(self, mapping: dict[str, str]) -> "BandSet":
        return BandSet(Segment(mapping.get(s.base, s.base), s.start, s.stop) for s in self.segments)

    def rotated(self, steps: int = 1) -> "BandSet":
        """Cyclic relabeling m1->m2->m3, X->Y->Z applied ``steps`` times."""
        return BandSet(
            Segment(_rotate_name(s.base, steps), s.start, s.stop) for s in self.segments
        )


_MACRO_SETS = tuple(BandSet.of(n) for n in MACRO_NAMES)
_GUARD_SET = BandSet.of(*GUARD_NAMES)
_TOTAL_SET = BandSet.of(*AXIS_ORDER)
_FEMTO_POOLS = tuple(_TOTAL_SET - m for m in _MACRO_SETS)


@dataclass(frozen=True)
class SpectrumPlan:
    """Cluster partition: three macro bands, three guard bands and |B_T|.

    Construction does not validate the layout so that inconsistent plans can
    be built by hand and rejected by :func:`verify_partition`.
    """

    macro_bands: tuple[Band, Band, Band]
    guard_bands: tuple[Band, Band, Band]
    total_hz: float

    @cached_property
    def _by_name(self) -> dict[str, Band]:
        return {b.name: b for b in self.macro_bands + self.guard_bands}

    @cached_property
    def _exact(self) -> dict[str, tuple[Fraction, Fraction]]:
        return {n: (Fraction(b.low_hz), Fraction(b.width_hz)) for n, b in self._by_name.items()}

    def band(self, name: str) -> Band:
        return self._by_name[name]

    @property
    def low_hz(self) -> float:
        return min(b.low_hz for b in self.macro_bands + self.guard_bands)

    def macro(self, serving_macro: int) -> BandSet:
        """B_m(i) as a band set."""
        _check_macro(serving_macro)
        return _MACRO_SETS[serving_macro - 1]

    @property
    def guard_set(self) -> BandSet:
        return _GUARD_SET

    @property
    def total(self) -> BandSet:
        return _TOTAL_SET

    def width_hz(self, bands: BandSet) -> float:
        return float(self.exact_width(bands))

    def exact_width(self, bands: BandSet) -> Fraction:
        exact = self._exact
        return sum((exact[s.base][1] * (s.stop - s.start) for s in bands.segments), Fraction(0))

    def intervals_hz(self, bands: BandSet) -> list[tuple[Fraction, Fraction]]:
        """Merged frequency intervals covered by ``bands``, exact in Hz."""
        raw = []
        for s in bands.segments:
            lo, w = self._exact[s.base]
            if s.start == 0 and s.stop == 1:
                raw.append((lo, lo + w))
            else:
                raw.append((lo + w * s.start, lo + w * s.stop))
        return _merge_intervals(raw)

    def inner_thirds(self, serving_macro: int) -> tuple[BandSet, BandSet, BandSet]:
        """The m4/m5/m6 thirds tiling the neighbour-macro pool of ``serving_macro``."""
        return tuple(split_evenly(self, inner_pool_order(serving_macro), 3))


def build_plan(macro_width_hz, guard_width_hz, low_hz: float = 0.0) -> SpectrumPlan:
    """Lay out ``m1, X, m2, Y, m3, Z`` contiguously from ``low_hz``.

    Either width may be a scalar (all three bands equal) or a sequence of three
    per-band widths.
    """
    macro_w = _three(macro_width_hz, "macro_width_hz")
    guard_w = _three(guard_width_hz, "guard_width_hz")
    widths = {}
    for i in range(3):
        widths[MACRO_NAMES[i]] = macro_w[i]
        widths[GUARD_NAMES[i]] = guard_w[i]
    bands = {}
    cursor = float(low_hz)
    for name in AXIS_ORDER:
        bands[name] = Band(name, cursor, widths[name])
        cursor += widths[name]
    return SpectrumPlan(
        macro_bands=tuple(bands[n] for n in MACRO_NAMES),
        guard_bands=tuple(bands[n] for n in GUARD_NAMES),
        total_hz=sum(widths.values()),
    )


def _three(value, what: str) -> tuple[float, float, float]:
    if isinstance(value, (int, float)):
        values = (float(value),) * 3
    else:
        values = tuple(float(v) for v in value)
        if len(values) != 3:
            raise ValueError(f"{what}: expected 3 widths, got {len(values)}")
    for v in values:
        if not v > 0:
            raise ValueError(f"{what}: widths must be > 0, got {v!r}")
    return values


def _merge_intervals(intervals, gap=0):
    merged: list[list] = []
    for lo, hi in sorted(intervals):
        if merged and lo <= merged[-1][1] + gap:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


def _intervals_overlap(a, b, slack=0) -> bool:
    return any(min(ah, bh) - max(al, bl) > slack for al, ah in a for bl, bh in b)


def femto_pool(plan: SpectrumPlan, serving_macro: int) -> BandSet:
    """B_f(i): every band of the cluster except the serving macro's own."""
    _check_macro(serving_macro)
    return _FEMTO_POOLS[serving_macro - 1]


def inner_pool_order(serving_macro: int) -> tuple[str, str]:
    """Neighbour macro bands in frequency order for macro 1, rotated otherwise."""
    _check_macro(serving_macro)
    return tuple(_rotate_name(n, serving_macro - 1) for n in ("m2", "m3"))


def edge_priority_order(serving_macro: int) -> tuple[str, str, str]:
    """Guard bands by decreasing priority; the one beside B_m(i) comes last."""
    _check_macro(serving_macro)
    return tuple(_rotate_name(n, serving_macro - 1) for n in ("Y", "Z", "X"))


def split_evenly(plan: SpectrumPlan, pool: Sequence[str], parts: int) -> list[BandSet]:
    """Tile the concatenated base bands ``pool`` into ``parts`` equal-width slices."""
    if parts < 1:
        raise ValueError(f"parts must be >= 1, got {parts}")
    return list(_split_cached(plan, tuple(pool), parts))


@lru_cache(maxsize=4096)
def _split_cached(plan: SpectrumPlan, pool: tuple[str, ...], parts: int) -> tuple[BandSet, ...]:
    widths = [plan._exact[n][1] for n in pool]
    total = sum(widths, Fraction(0))
    cuts = [total * k / parts for k in range(1, parts + 1)]
    slices: list[list[Segment]] = [[] for _ in range(parts)]
    k, offset = 0, Fraction(0)
    # one pass over band edges and cut points, both ascending
    for name, w in zip(pool, widths):
        end, lo = offset + w, offset
        while lo < end:
            hi = min(end, cuts[k])
            slices[k].append(Segment(name, (lo - offset) / w, (hi - offset) / w))
            if hi == cuts[k] and k < parts - 1:
                k += 1
            lo = hi
        offset = end
    slices = [BandSet(segs) for segs in slices]
    return tuple(slices)


def _check_group(group_size: int) -> None:
    if group_size not in (1, 2, 3):
        raise ValueError(f"group_size must be 1, 2 or 3, got {group_size!r}")


def edge_subbands(plan: SpectrumPlan, serving_macro: int, group_size: int) -> list[BandSet]:
    """Guard sub-bands for a cell-edge conflict group, one set per member.

    For macro 1 the sets are ``[Y+Z]``, ``[Y+upper X, Z+lower X]`` and
    ``[X, Y, Z]`` for group sizes 1, 2 and 3.  Other macros get the rotated
    assignment.
    """
    _check_macro(serving_macro)
    _check_group(group_size)
    half = Fraction(1, 2)
    if group_size == 1:
        base = [BandSet.of("Y", "Z")]
    elif group_size == 2:
        base = [
            BandSet.of("Y") | BandSet.part("X", half, 1),
            BandSet.of("Z") | BandSet.part("X", 0, half),
        ]
    else:
        base = [BandSet.of("X"), BandSet.of("Y"), BandSet.of("Z")]
    return [b.rotated(serving_macro - 1) for b in base]


def inner_subbands(plan: SpectrumPlan, serving_macro: int, group_size: int) -> list[BandSet]:
    """Neighbour-macro sub-bands for an inner conflict group, one set per member."""
    _check_macro(serving_macro)
    _check_group(group_size)
    if group_size == 1:
        return [BandSet.of(*inner_pool_order(serving_macro))]
    if group_size == 2:
        return [BandSet.of(n) for n in inner_pool_order(serving_macro)]
    return list(plan.inner_thirds(serving_macro))


def verify_partition(plan: SpectrumPlan, rel_tol: float = 1e-9) -> dict[str, bool]:
    """Check B_mi and B_fi are disjoint and together cover B_T, for each macro.

    The checks run on the actual frequency intervals of the plan so that a
    hand-built plan with overlapping bands or a wrong ``total_hz`` fails.
    Band edges are floats, so gaps and overlaps below ``rel_tol`` of the total
    width are treated as rounding.
    """
    lo = Fraction(plan.low_hz)
    hi = lo + Fraction(plan.total_hz)
    tol = Fraction(rel_tol) * abs(Fraction(plan.total_hz))
    report = {}
    for i in (1, 2, 3):
        macro_iv = plan.intervals_hz(plan.macro(i))
        pool_iv = plan.intervals_hz(femto_pool(plan, i))
        report[f"m{i}_disjoint"] = not _intervals_overlap(macro_iv, pool_iv, tol)
        merged = _merge_intervals(macro_iv + pool_iv, tol)
        report[f"m{i}_union"] = (len(merged) == 1 and abs(merged[0][0] - lo) <= tol
                                 and abs(merged[0][1] - hi) <= tol)
    return report


def width_identities(plan: SpectrumPlan) -> dict[str, tuple[float, float]]:
    """(lhs, rhs) pairs of the width bookkeeping identities of the partition."""
    w = {b.name: b.width_hz for b in plan.macro_bands + plan.guard_bands}
    guard = w["X"] + w["Y"] + w["Z"]
    out = {"total": (plan.total_hz, sum(w.values()))}
    for i in (1, 2, 3):
        pool = inner_pool_order(i)
        third = (w[pool[0]] + w[pool[1]]) / 3
        for k, t in enumerate(plan.inner_thirds(i), start=4):
            out[f"m{i}_third{k}"] = (plan.width_hz(t), third)
        others = sum(w[n] for n in MACRO_NAMES if n != f"m{i}")
        out[f"f{i}"] = (plan.width_hz(femto_pool(plan, i)), others + guard)
    return out
