"""Plug-and-play band selection for newly installed femtocells.

A new FAP measures the three macro signals, picks the strongest as its
serving macro, and decides it sits in the guard region (cell edge) when either
neighbour macro is heard above ``s_th_w``.  It then counts the femtocells it
hears within the sensing radius and the resulting conflict group splits the
zone's band pool among its members.

Conflict groups are merged transitively: a femto joining any member of an
existing group joins the whole group, and the merged group is re-partitioned.
Groups are therefore the connected components of the "within sensing range"
graph among femtos sharing a pool, so every group always holds a disjoint
tiling of its pool and the final partition does not depend on install order.
"""

from __future__ import annotations

import csv
import enum
import logging
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import propagation as prop
from .spectrum import (
    GUARD_NAMES,
    BandSet,
    SpectrumPlan,
    edge_priority_order,
    edge_subbands,
    inner_pool_order,
    inner_subbands,
    split_evenly,
)

log = logging.getLogger(__name__)


class Tier(str, enum.Enum):
    MACRO = "macro"
    FEMTO = "femto"


class Zone(str, enum.Enum):
    INNER = "inner"
    CELL_EDGE = "cell_edge"


class NoCoverageError(RuntimeError):
    """No macro signal was detected at all."""


@dataclass(frozen=True)
class NetworkNode:
    id: int
    tier: Tier
    position: tuple[float, float]
    tx_power_w: float
    height_m: float
    serving_macro: int | None = None

    def __post_init__(self):
        if not self.tx_power_w > 0:
            raise ValueError(f"node {self.id}: tx_power_w must be > 0")
        if self.tier is Tier.MACRO and self.serving_macro is not None:
            raise ValueError(f"macro node {self.id} cannot have a serving macro")


@dataclass(frozen=True)
class SensingReport:
    s1_w: float
    s2_w: float
    s3_w: float
    interferer_ids: tuple[int, ...] = ()

    def __post_init__(self):
        if min(self.signals) < 0:
            raise ValueError("received powers must be >= 0")

    @property
    def signals(self) -> tuple[float, float, float]:
        return (self.s1_w, self.s2_w, self.s3_w)


@dataclass(frozen=True)
class SensingConfig:
    f_c_mhz: float = 900.0
    sensing_radius_m: float = 60.0
    shadowing_db: float = 0.0
    constant_mode: str = prop.PAPER
    min_distance_m: float = 1.0


@dataclass(frozen=True)
class FemtoAllocation:
    femto_id: int
    serving_macro: int
    zone: Zone
    group: tuple[int, ...]
    assigned_bands: BandSet

    @property
    def oversized(self) -> bool:
        """Group larger than the three-way split the selection rule enumerates."""
        return len(self.group) > 3


def _macros(world: Iterable[NetworkNode]) -> list[NetworkNode]:
    macros = sorted((n for n in world if n.tier is Tier.MACRO), key=lambda n: n.id)
    if len(macros) != 3:
        raise ValueError(f"world must hold exactly 3 macro nodes, found {len(macros)}")
    return macros


def sense_many(nodes: Sequence[NetworkNode], world: Iterable[NetworkNode],
               rng: np.random.Generator | None = None,
               config: SensingConfig = SensingConfig()) -> list[SensingReport]:
    """Sensing reports for several femtos at once.

    Macros in ``world`` are numbered 1..3 by ascending id.  Interferers are
    the other femtos of ``world`` within ``config.sensing_radius_m``.
    """
    world = list(world)
    macros = _macros(world)
    femtos = [n for n in world if n.tier is Tier.FEMTO]
    if any(n.tier is not Tier.FEMTO for n in nodes):
        raise ValueError("only femto nodes can sense")
    if not nodes:
        return []
    pos = np.array([n.position for n in nodes], dtype=float)
    mpos = np.array([m.position for m in macros], dtype=float)
    d = np.linalg.norm(pos[:, None, :] - mpos[None, :, :], axis=-1)
    shadow = 0.0
    if config.shadowing_db > 0:
        if rng is None:
            raise ValueError("sensing shadowing needs an rng")
        shadow = prop.sample_shadowing(rng, config.shadowing_db, d.shape)
    s = prop.macro_received_power(
        np.array([m.tx_power_w for m in macros])[None, :],
        config.f_c_mhz,
        np.array([m.height_m for m in macros])[None, :],
        np.array([n.height_m for n in nodes])[:, None],
        d,
        shadow,
        config.constant_mode,
        config.min_distance_m,
    )
    if femtos:
        fpos = np.array([f.position for f in femtos], dtype=float)
        fid = np.array([f.id for f in femtos])
        dist = np.linalg.norm(pos[:, None, :] - fpos[None, :, :], axis=-1)
        near = (dist <= config.sensing_radius_m) & (fid[None, :] != np.array(
            [n.id for n in nodes])[:, None])
    reports = []
    for k in range(len(nodes)):
        ids = tuple(int(i) for i in np.sort(fid[near[k]])) if femtos else ()
        reports.append(SensingReport(float(s[k, 0]), float(s[k, 1]), float(s[k, 2]), ids))
    return reports


def sense(node: NetworkNode, world: Iterable[NetworkNode],
          rng: np.random.Generator | None = None,
          config: SensingConfig = SensingConfig()) -> SensingReport:
    """Measure S1..S3 from the macro BSs and list femtos within sensing range."""
    return sense_many([node], world, rng, config)[0]


def classify(report: SensingReport, s_th_w: float) -> tuple[int, Zone]:
    """Serving macro (strongest signal, lowest index on ties) and zone."""
    signals = report.signals
    if max(signals) <= 0:
        raise NoCoverageError("no macro signal detected")
    serving = 0
    for i in (1, 2):
        if signals[i] > signals[serving]:
            serving = i
    edge = any(s > s_th_w for i, s in enumerate(signals) if i != serving)
    return serving + 1, Zone.CELL_EDGE if edge else Zone.INNER


class DFRPartition:
    """Band pools and group splits of the dynamic frequency reuse scheme.

    With ``guard_region=False`` every femto is treated as inner, which turns
    the guard branch off.
    """

    def __init__(self, guard_region: bool = True):
        self.guard_region = guard_region

    def effective_zone(self, zone: Zone) -> Zone:
        return zone if self.guard_region else Zone.INNER

    def pool_key(self, serving_macro: int, zone: Zone):
        return (serving_macro, zone)

    def pool(self, plan: SpectrumPlan, serving_macro: int, zone: Zone) -> BandSet:
        if zone is Zone.CELL_EDGE:
            return plan.guard_set
        return BandSet.of(*inner_pool_order(serving_macro))

    def split(self, plan: SpectrumPlan, serving_macro: int, zone: Zone,
              group_size: int) -> list[BandSet]:
        if group_size <= 3:
            if zone is Zone.CELL_EDGE:
                return edge_subbands(plan, serving_macro, group_size)
            return inner_subbands(plan, serving_macro, group_size)
        order = (edge_priority_order(serving_macro) if zone is Zone.CELL_EDGE
                 else inner_pool_order(serving_macro))
        return split_evenly(plan, order, group_size)


class DedicatedPartition:
    """All femtos share the guard set, split evenly within each conflict group."""

    def effective_zone(self, zone: Zone) -> Zone:
        return zone

    def pool_key(self, serving_macro: int, zone: Zone):
        return "guard"

    def pool(self, plan: SpectrumPlan, serving_macro: int, zone: Zone) -> BandSet:
        return plan.guard_set

    def split(self, plan: SpectrumPlan, serving_macro: int, zone: Zone,
              group_size: int) -> list[BandSet]:
        return split_evenly(plan, GUARD_NAMES, group_size)


class FemtoNetwork:
    """World state: three macros, installed femtos and their allocations.

    Installs are serialised; :meth:`snapshot` returns an immutable copy.
    """

    def __init__(self, plan: SpectrumPlan, macros: Sequence[NetworkNode], s_th_w: float,
                 partition=None, sensing: SensingConfig = SensingConfig()):
        self.plan = plan
        self.s_th_w = s_th_w
        self.partition = partition if partition is not None else DFRPartition()
        self.sensing = sensing
        self.nodes: dict[int, NetworkNode] = {}
        for m in _macros(macros):
            self.nodes[m.id] = m
        self._alloc: dict[int, FemtoAllocation] = {}
        self._warned_oversized = False

    @property
    def femtos(self) -> list[NetworkNode]:
        return [n for n in self.nodes.values() if n.tier is Tier.FEMTO]

    def _check_new(self, node: NetworkNode) -> None:
        if node.tier is not Tier.FEMTO:
            raise ValueError(f"node {node.id} is not a femto")
        if node.id in self.nodes:
            raise ValueError(f"duplicate node id {node.id}")

    def install_femto(self, node: NetworkNode, rng: np.random.Generator | None = None,
                      report: SensingReport | None = None) -> tuple[FemtoAllocation, ...]:
        """Classify ``node``, join or form its conflict group and rebalance it."""
        self._check_new(node)
        if report is None:
            report = sense(node, self.nodes.values(), rng, self.sensing)
        serving, zone = classify(report, self.s_th_w)
        zone = self.partition.effective_zone(zone)
        key = self.partition.pool_key(serving, zone)
        members = {node.id}
        for j in report.interferer_ids:
            other = self._alloc.get(j)
            if other is not None and self.partition.pool_key(other.serving_macro,
                                                             other.zone) == key:
                members.update(other.group)
        self.nodes[node.id] = node
        self._assign(sorted(members), serving, zone)
        return self.snapshot()

    def install_many(self, nodes: Sequence[NetworkNode],
                     reports: Sequence[SensingReport] | None = None,
                     rng: np.random.Generator | None = None) -> tuple[FemtoAllocation, ...]:
        """Install several femtos; ends in the same state as one-by-one installs.

        ``reports`` must be sensed against the final world (all nodes present).
        """
        seen = set()
        for n in nodes:
            self._check_new(n)
            if n.id in seen:
                raise ValueError(f"duplicate node id {n.id}")
            seen.add(n.id)
        for n in nodes:
            self.nodes[n.id] = n
        if reports is None:
            reports = sense_many(nodes, self.nodes.values(), rng, self.sensing)
        index = {n.id: k for k, n in enumerate(nodes)}
        for fid, alloc in self._alloc.items():
            index.setdefault(fid, len(index))
        ids = sorted(index, key=index.get)
        keys, serving_of, zone_of = [], {}, {}
        for n, rep in zip(nodes, reports):
            serving, zone = classify(rep, self.s_th_w)
            zone = self.partition.effective_zone(zone)
            serving_of[n.id], zone_of[n.id] = serving, zone
        for fid in ids[len(nodes):]:
            a = self._alloc[fid]
            serving_of[fid], zone_of[fid] = a.serving_macro, a.zone
        keys = [self.partition.pool_key(serving_of[i], zone_of[i]) for i in ids]
        rows, cols = [], []
        for n, rep in zip(nodes, reports):
            a = index[n.id]
            for j in rep.interferer_ids:
                b = index.get(j)
                if b is not None and keys[a] == keys[b]:
                    rows.append(a)
                    cols.append(b)
        for fid in ids[len(nodes):]:
            for j in self._alloc[fid].group:
                rows.append(index[fid])
                cols.append(index[j])
        m = len(ids)
        graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(m, m))
        _, labels = connected_components(graph, directed=False)
        comps: dict[int, list[int]] = {}
        for k, lab in enumerate(labels):
            comps.setdefault(int(lab), []).append(ids[k])
        for members in comps.values():
            members.sort()
            self._assign(members, serving_of[members[0]], zone_of[members[0]])
        return self.snapshot()

    def _assign(self, members: list[int], serving: int, zone: Zone) -> None:
        parts = self.partition.split(self.plan, serving, zone, len(members))
        group = tuple(members)
        if len(group) > 3 and not self._warned_oversized:
            log.info("conflict group of %d femtos: pool tiled into equal slices", len(group))
            self._warned_oversized = True
        for fid, bands in zip(group, parts):
            self._alloc[fid] = FemtoAllocation(fid, serving, zone, group, bands)

    def snapshot(self) -> tuple[FemtoAllocation, ...]:
        return tuple(self._alloc[k] for k in sorted(self._alloc))


def allocation_snapshot(network: FemtoNetwork) -> tuple[FemtoAllocation, ...]:
    return network.snapshot()


ALLOCATION_COLUMNS = ("femto_id", "serving_macro", "zone", "group", "band_names",
                      "total_width_hz")


def write_allocations_csv(path, allocations: Iterable[FemtoAllocation],
                          plan: SpectrumPlan) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ALLOCATION_COLUMNS)
        for a in allocations:
            w.writerow([a.femto_id, a.serving_macro, a.zone.value,
                        " ".join(str(i) for i in a.group), a.assigned_bands.label,
                        repr(plan.width_hz(a.assigned_bands))])


def allocations_by_id(allocations: Iterable[FemtoAllocation]) -> Mapping[int, FemtoAllocation]:
    return {a.femto_id: a for a in allocations}
