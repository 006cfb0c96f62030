"""Cluster geometry, deployments, baseline schemes and Monte-Carlo runs.

A trial places a reference FAP at ``reference_distance_m`` from macro 1 on the
axis towards the cluster centroid, ``n`` interfering FAPs uniformly in the
sensing disc around it, one FUE per FAP and one MUE per macrocell.  Every
scheme is evaluated on the same deployment and the same shadowing draws, so
per-trial comparisons between schemes are paired.

Random streams are keyed per entity (reference cell, MUE of macro i,
interferer j) rather than drawn sequentially, so the deployment for ``n``
interferers is a prefix of the deployment for ``n + 1`` within a trial.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import metrics
from . import propagation as prop
from .allocation import (
    DedicatedPartition,
    DFRPartition,
    FemtoAllocation,
    FemtoNetwork,
    NetworkNode,
    SensingConfig,
    SensingReport,
    Tier,
    Zone,
    classify,
    sense_many,
)
from .spectrum import BandSet, SpectrumPlan, build_plan


class Scheme(str, enum.Enum):
    DFR_GUARD = "dfr_guard"
    DFR_PLAIN = "dfr_plain"
    COCHANNEL = "cochannel"
    DEDICATED = "dedicated"
    HYBRID = "hybrid"


ALL_SCHEMES = tuple(Scheme)

MUE = "mue"
INNER_FUE = "inner_fue"
EDGE_FUE = "edge_fue"
USER_CLASSES = (MUE, INNER_FUE, EDGE_FUE)

REFERENCE_FAP_ID = 4

# spawn-key tags of the per-entity random streams
_REF, _MUE, _INTERFERER, _FEMTO_SHADOW = 0, 1, 2, 3


@dataclass(frozen=True)
class ClusterGeometry:
    """Three macro BSs on an equilateral triangle of side sqrt(3) R.

    The centroid is the origin and macro 1 sits at ``(-R, 0)``, so the axis
    from macro 1 towards the centroid is the +x axis.
    """

    macro_positions: tuple[tuple[float, float], ...]
    macro_radius_m: float = 1000.0
    femto_radius_m: float = 10.0

    def __post_init__(self):
        if len(self.macro_positions) != 3:
            raise ValueError("need exactly three macro positions")
        if not (self.macro_radius_m > 0 and self.femto_radius_m > 0):
            raise ValueError("radii must be > 0")

    @classmethod
    def triangle(cls, macro_radius_m: float = 1000.0, femto_radius_m: float = 10.0):
        pts = tuple(
            (macro_radius_m * math.cos(math.radians(a)), macro_radius_m * math.sin(math.radians(a)))
            for a in (180.0, 300.0, 60.0)
        )
        return cls(pts, macro_radius_m, femto_radius_m)

    @property
    def centroid(self) -> tuple[float, float]:
        xs, ys = zip(*self.macro_positions)
        return (sum(xs) / 3, sum(ys) / 3)

    def point_towards_centroid(self, distance_m: float, macro: int = 1) -> tuple[float, float]:
        mx, my = self.macro_positions[macro - 1]
        cx, cy = self.centroid
        norm = math.hypot(cx - mx, cy - my)
        return (mx + (cx - mx) * distance_m / norm, my + (cy - my) * distance_m / norm)


@dataclass(frozen=True)
class ExperimentConfig:
    schemes: tuple[Scheme, ...] = ALL_SCHEMES
    n_interfering_femtos: tuple[int, ...] = (15,)
    reference_distance_m: float = 900.0
    trials: int = 1000
    seed: int = 2024
    workers: int = 1
    # spectrum
    macro_width_hz: float = 10e6
    guard_width_hz: float = 2e6
    # propagation
    carrier_mhz: float = 900.0
    macro_tx_w: float = 1500.0
    femto_tx_w: float = 0.01
    macro_height_m: float = 50.0
    femto_height_m: float = 2.0
    mobile_height_m: float = 1.5
    decay_index: float = 30.0
    shadowing_db: float = 8.0
    indoor_shadowing_db: float = 0.0
    constant_mode: str = prop.PAPER
    min_distance_m: float = 1.0
    # geometry and allocation
    macro_radius_m: float = 1000.0
    femto_radius_m: float = 10.0
    sensing_radius_m: float = 60.0
    sensing_shadowing_db: float = 0.0
    s_th_dbm: float | None = None
    s_th_distance_m: float = 1200.0
    # metrics
    x_prob: float = 1.0
    y_prob: float = 1.0
    noise_figure_db: float = 9.0
    noise_density_dbm_hz: float = metrics.THERMAL_NOISE_DBM_HZ
    delta_b_hz: float = 15e3
    zeta_db: float = 7.0

    def __post_init__(self):
        object.__setattr__(self, "schemes", tuple(Scheme(s) for s in self.schemes))
        object.__setattr__(self, "n_interfering_femtos",
                           tuple(int(n) for n in self.n_interfering_femtos))

    def validate(self) -> "ExperimentConfig":
        def need(cond, msg):
            if not cond:
                raise ValueError(msg)

        need(self.trials >= 1, "trials must be >= 1")
        need(self.workers >= 1, "workers must be >= 1")
        need(len(self.schemes) > 0, "at least one scheme is required")
        need(len(self.n_interfering_femtos) > 0, "at least one density is required")
        need(all(n >= 0 for n in self.n_interfering_femtos), "n_interfering_femtos must be >= 0")
        need(0 < self.reference_distance_m <= self.macro_radius_m,
             "reference_distance_m must lie in (0, macro_radius_m]")
        for name in ("macro_width_hz", "guard_width_hz", "carrier_mhz", "macro_tx_w", "femto_tx_w",
                     "macro_height_m", "femto_height_m", "mobile_height_m", "decay_index",
                     "macro_radius_m", "femto_radius_m", "sensing_radius_m", "s_th_distance_m",
                     "delta_b_hz", "min_distance_m"):
            need(getattr(self, name) > 0, f"{name} must be > 0")
        for name in ("shadowing_db", "indoor_shadowing_db", "sensing_shadowing_db"):
            need(getattr(self, name) >= 0, f"{name} must be >= 0")
        need(0 <= self.x_prob <= 1 and 0 <= self.y_prob <= 1, "x_prob, y_prob must lie in [0, 1]")
        need(self.constant_mode in prop.CONSTANT_MODES,
             f"constant_mode must be one of {prop.CONSTANT_MODES}")
        return self

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["schemes"] = [s.value for s in self.schemes]
        d["n_interfering_femtos"] = list(self.n_interfering_femtos)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def plan(self) -> SpectrumPlan:
        return build_plan(self.macro_width_hz, self.guard_width_hz)

    def geometry(self) -> ClusterGeometry:
        return ClusterGeometry.triangle(self.macro_radius_m, self.femto_radius_m)

    def sensing(self) -> SensingConfig:
        return SensingConfig(self.carrier_mhz, self.sensing_radius_m, self.sensing_shadowing_db,
                             self.constant_mode, self.min_distance_m)

    def s_th_w(self) -> float:
        """Guard-region threshold on neighbour-macro power, in watts.

        Defaults to the shadowing-free power a neighbour macro delivers to a
        FAP at ``s_th_distance_m``.
        """
        if self.s_th_dbm is not None:
            return float(prop.dbm_to_watts(self.s_th_dbm))
        return float(prop.macro_received_power(
            self.macro_tx_w, self.carrier_mhz, self.macro_height_m, self.femto_height_m,
            self.s_th_distance_m, 0.0, self.constant_mode, self.min_distance_m))

    @property
    def zeta_linear(self) -> float:
        return float(prop.db_to_linear(self.zeta_db))


@dataclass(frozen=True)
class User:
    id: int
    server_id: int
    position: tuple[float, float]
    height_m: float


@dataclass(frozen=True)
class World:
    """One deployment plus the random draws every scheme shares."""

    macros: tuple[NetworkNode, ...]
    femtos: tuple[NetworkNode, ...]
    users: tuple[User, ...]
    reports: tuple[SensingReport, ...]
    macro_shadow_db: np.ndarray  # (n_users, 3)
    femto_shadow_db: np.ndarray  # (n_users, n_femtos)

    @property
    def nodes(self) -> tuple[NetworkNode, ...]:
        return self.macros + self.femtos


def _stream(entropy: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=key))


def _uniform_disc(rng: np.random.Generator, radius: float) -> tuple[float, float]:
    r = radius * math.sqrt(rng.random())
    a = 2 * math.pi * rng.random()
    return (r * math.cos(a), r * math.sin(a))


def generate_deployment(config: ExperimentConfig, rng: np.random.Generator,
                        n_interferers: int | None = None) -> World:
    """Draw one deployment for ``n_interferers`` (default: the first configured density)."""
    if config.reference_distance_m > config.macro_radius_m:
        raise ValueError("reference distance exceeds the macrocell radius")
    if n_interferers is None:
        n_interferers = config.n_interfering_femtos[0]
    geom = config.geometry()
    entropy = int(rng.integers(2**63))

    macros = tuple(
        NetworkNode(i + 1, Tier.MACRO, geom.macro_positions[i], config.macro_tx_w,
                    config.macro_height_m)
        for i in range(3)
    )
    femtos, users, fue_shadow, sense_shadow = [], [], [], []
    mues = []
    mue_shadow = []
    for i in range(3):
        g = _stream(entropy, _MUE, i)
        dx, dy = _uniform_disc(g, geom.macro_radius_m)
        mx, my = geom.macro_positions[i]
        mues.append(User(i + 1, i + 1, (mx + dx, my + dy), config.mobile_height_m))
        mue_shadow.append(prop.sample_shadowing(g, config.shadowing_db, 3))

    ref_pos = geom.point_towards_centroid(config.reference_distance_m)
    cells = [(_stream(entropy, _REF), ref_pos)]
    for j in range(n_interferers):
        g = _stream(entropy, _INTERFERER, j)
        dx, dy = _uniform_disc(g, config.sensing_radius_m)
        cells.append((g, (ref_pos[0] + dx, ref_pos[1] + dy)))
    for k, (g, pos) in enumerate(cells):
        fid = REFERENCE_FAP_ID + k
        femtos.append(NetworkNode(fid, Tier.FEMTO, pos, config.femto_tx_w, config.femto_height_m))
        dx, dy = _uniform_disc(g, geom.femto_radius_m)
        users.append(User(fid, fid, (pos[0] + dx, pos[1] + dy), config.mobile_height_m))
        fue_shadow.append(prop.sample_shadowing(g, config.shadowing_db, 3))
        sense_shadow.append(prop.sample_shadowing(g, config.sensing_shadowing_db, 3))

    users = mues + users
    macro_shadow = np.vstack([np.atleast_1d(s) * np.ones(3) for s in mue_shadow + fue_shadow])
    femto_shadow = np.zeros((len(users), len(femtos)))
    if config.indoor_shadowing_db > 0:
        for a, u in enumerate(users):
            for b, f in enumerate(femtos):
                femto_shadow[a, b] = _stream(entropy, _FEMTO_SHADOW, u.id, f.id).normal(
                    0.0, config.indoor_shadowing_db)

    reports = _sense_with_shadow(femtos, macros, config, np.vstack(
        [np.atleast_1d(s) * np.ones(3) for s in sense_shadow]))
    return World(macros, tuple(femtos), tuple(users), tuple(reports), macro_shadow, femto_shadow)


def _sense_with_shadow(femtos, macros, config: ExperimentConfig, shadow_db: np.ndarray):
    quiet = dataclasses.replace(config.sensing(), shadowing_db=0.0)
    reports = sense_many(femtos, macros + tuple(femtos), None, quiet)
    if not np.any(shadow_db):
        return reports
    out = []
    for rep, sh in zip(reports, shadow_db):
        s = np.array(rep.signals) * prop.db_to_linear(-sh)
        out.append(SensingReport(float(s[0]), float(s[1]), float(s[2]), rep.interferer_ids))
    return out


def apply_scheme(world: World, scheme: Scheme, plan: SpectrumPlan, config: ExperimentConfig,
                 rng: np.random.Generator | None = None) -> tuple[FemtoAllocation, ...]:
    """Femto band allocation under ``scheme``; sensing comes from ``world.reports``.

    ``rng`` is accepted for interface symmetry; every random draw a scheme
    depends on is already part of ``world``.
    """
    scheme = Scheme(scheme)
    s_th = config.s_th_w()
    femtos, reports = world.femtos, world.reports
    if scheme in (Scheme.DFR_GUARD, Scheme.DFR_PLAIN, Scheme.DEDICATED):
        part = (DedicatedPartition() if scheme is Scheme.DEDICATED
                else DFRPartition(guard_region=scheme is Scheme.DFR_GUARD))
        net = FemtoNetwork(plan, world.macros, s_th, part, config.sensing())
        return net.install_many(femtos, reports)

    out = {}
    edge_nodes, edge_reports = [], []
    for node, rep in zip(femtos, reports):
        serving, zone = classify(rep, s_th)
        if scheme is Scheme.HYBRID and zone is Zone.CELL_EDGE:
            edge_nodes.append(node)
            edge_reports.append(rep)
        else:
            out[node.id] = FemtoAllocation(node.id, serving, zone, (node.id,), plan.macro(serving))
    if edge_nodes:
        net = FemtoNetwork(plan, world.macros, s_th, DedicatedPartition(), config.sensing())
        for a in net.install_many(edge_nodes, edge_reports):
            out[a.femto_id] = a
    return tuple(out[k] for k in sorted(out))


@dataclass
class TrialResult:
    """Per-user arrays for one (scheme, density, trial) evaluation."""

    user_id: np.ndarray
    user_class: np.ndarray
    desired_w: np.ndarray
    macro_interf_w: np.ndarray
    femto_interf_w: np.ndarray
    noise_w: np.ndarray
    bandwidth_hz: np.ndarray
    sinr: np.ndarray
    rate_bps: np.ndarray
    outage_prob: np.ndarray

    @property
    def sinr_db(self) -> np.ndarray:
        return 10.0 * np.log10(self.sinr)

    def link_samples(self, config: ExperimentConfig) -> list[metrics.LinkSample]:
        return [
            metrics.LinkSample(int(self.user_id[k]), float(self.desired_w[k]),
                               float(self.macro_interf_w[k]), float(self.femto_interf_w[k]),
                               float(self.noise_w[k]), config.x_prob, config.y_prob,
                               float(self.bandwidth_hz[k]))
            for k in range(len(self.user_id))
        ]


@dataclass(frozen=True)
class _LinkGains:
    power: np.ndarray       # (users, transmitters) received power in W
    near: np.ndarray        # (users, transmitters) femto within sensing radius
    server: np.ndarray      # (users,) transmitter index of each user's server
    user_class: np.ndarray  # (users,)
    user_id: np.ndarray


def link_gains(world: World, config: ExperimentConfig) -> _LinkGains:
    """Received power from every transmitter at every user (shadowing included)."""
    tx = world.nodes
    upos = np.array([u.position for u in world.users], dtype=float)
    uh = np.array([u.height_m for u in world.users], dtype=float)
    mpos = np.array([m.position for m in world.macros], dtype=float)
    dm = np.linalg.norm(upos[:, None, :] - mpos[None, :, :], axis=-1)
    pm = prop.macro_received_power(
        np.array([m.tx_power_w for m in world.macros])[None, :], config.carrier_mhz,
        np.array([m.height_m for m in world.macros])[None, :], uh[:, None], dm,
        world.macro_shadow_db, config.constant_mode, config.min_distance_m)
    power = np.empty((len(world.users), len(tx)))
    power[:, :3] = pm
    near = np.zeros_like(power, dtype=bool)
    if world.femtos:
        fpos = np.array([f.position for f in world.femtos], dtype=float)
        df = np.linalg.norm(upos[:, None, :] - fpos[None, :, :], axis=-1)
        power[:, 3:] = prop.femto_received_power(
            np.array([f.tx_power_w for f in world.femtos])[None, :], config.carrier_mhz, df,
            config.decay_index, world.femto_shadow_db, config.min_distance_m)
        near[:, 3:] = df <= config.sensing_radius_m
    index = {n.id: k for k, n in enumerate(tx)}
    server = np.array([index[u.server_id] for u in world.users])
    s_th = config.s_th_w()
    zone_of = {f.id: classify(r, s_th)[1] for f, r in zip(world.femtos, world.reports)}
    classes = np.array([
        MUE if u.server_id <= 3 else (EDGE_FUE if zone_of[u.server_id] is Zone.CELL_EDGE
                                      else INNER_FUE)
        for u in world.users
    ])
    return _LinkGains(power, near, server, classes, np.array([u.id for u in world.users]))


@lru_cache(maxsize=256)
def _overlap_matrix(bands: tuple[BandSet, ...]) -> np.ndarray:
    n = len(bands)
    out = np.zeros((n, n), dtype=bool)
    for a in range(n):
        out[a, a] = bool(bands[a])
        for b in range(a + 1, n):
            out[a, b] = out[b, a] = not bands[a].isdisjoint(bands[b])
    out.setflags(write=False)
    return out


@lru_cache(maxsize=4096)
def _width(plan: SpectrumPlan, bands: BandSet) -> float:
    return plan.width_hz(bands)


def transmitter_bands(world: World, allocations: Sequence[FemtoAllocation],
                      plan: SpectrumPlan) -> tuple[BandSet, ...]:
    by_id = {a.femto_id: a.assigned_bands for a in allocations}
    missing = [f.id for f in world.femtos if f.id not in by_id]
    if missing:
        raise ValueError(f"no allocation for femtos {missing}")
    return tuple(plan.macro(i) for i in (1, 2, 3)) + tuple(by_id[f.id] for f in world.femtos)


def evaluate(world: World, allocations: Sequence[FemtoAllocation], config: ExperimentConfig,
             rng: np.random.Generator | None = None, gains: _LinkGains | None = None,
             plan: SpectrumPlan | None = None) -> TrialResult:
    """SINR, rate and outage of every user in ``world`` under ``allocations``.

    A transmitter interferes with a user when its band overlaps the user's
    band; femto interferers only count within the sensing radius of the user.
    """
    plan = plan or config.plan()
    gains = gains or link_gains(world, config)
    bands = transmitter_bands(world, allocations, plan)
    overlap = _overlap_matrix(bands)
    n_users = len(world.users)
    rows = np.arange(n_users)
    mask = overlap[gains.server].copy()
    mask[rows, gains.server] = False
    mask[:, 3:] &= gains.near[:, 3:]
    interf = np.where(mask, gains.power, 0.0)
    macro_i = interf[:, :3].sum(axis=1)
    femto_i = interf[:, 3:].sum(axis=1)
    width = np.array([_width(plan, bands[s]) for s in gains.server])
    noise = metrics.noise_power(width, config.noise_figure_db, config.noise_density_dbm_hz)
    desired = gains.power[rows, gains.server]
    sinr = desired / (config.x_prob * macro_i + config.y_prob * femto_i + noise)
    return TrialResult(
        user_id=gains.user_id,
        user_class=gains.user_class,
        desired_w=desired,
        macro_interf_w=macro_i,
        femto_interf_w=femto_i,
        noise_w=noise,
        bandwidth_hz=width,
        sinr=sinr,
        rate_bps=metrics.capacity(width, sinr),
        outage_prob=metrics.outage_probability(sinr, config.zeta_linear),
    )


RESULT_COLUMNS = ("scheme", "n_femtos", "trial", "user_class", "user_id", "sinr_db", "rate_bps",
                  "outage_prob")


@dataclass
class ExperimentResult:
    """Row table of per-user results plus helpers for aggregation.

    Columns are stored as numpy arrays; rows are ordered by density, then
    scheme, then trial, then user.
    """

    config: ExperimentConfig
    columns: dict[str, np.ndarray] = field(default_factory=dict)
    macro_interf_w: np.ndarray | None = None
    femto_interf_w: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.columns.get("trial", ()))

    def select(self, scheme=None, n_femtos=None, user_class=None, user_id=None) -> np.ndarray:
        m = np.ones(len(self), dtype=bool)
        if scheme is not None:
            m &= self.columns["scheme"] == Scheme(scheme).value
        if n_femtos is not None:
            m &= self.columns["n_femtos"] == n_femtos
        if user_class is not None:
            m &= self.columns["user_class"] == user_class
        if user_id is not None:
            m &= self.columns["user_id"] == user_id
        return m

    def mean(self, metric: str, **where) -> float:
        vals = self.columns[metric][self.select(**where)]
        return float(vals.mean()) if len(vals) else float("nan")

    def iter_rows(self):
        c = self.columns
        for k in range(len(self)):
            yield (c["scheme"][k], int(c["n_femtos"][k]), int(c["trial"][k]),
                   c["user_class"][k], int(c["user_id"][k]), float(c["sinr_db"][k]),
                   float(c["rate_bps"][k]), float(c["outage_prob"][k]))

    def summary(self) -> list[dict]:
        """Mean and 95% confidence half-width per scheme, density, class and metric.

        The ``system`` class carries the per-trial average system sum rate.
        """
        out = []
        c = self.columns
        for n in self.config.n_interfering_femtos:
            for scheme in self.config.schemes:
                base = self.select(scheme=scheme, n_femtos=n)
                for cls in USER_CLASSES:
                    m = base & (c["user_class"] == cls)
                    if not m.any():
                        continue
                    for metric in ("sinr_db", "rate_bps", "outage_prob"):
                        out.append(_agg(scheme.value, n, cls, metric, c[metric][m]))
                out.append(_agg(scheme.value, n, "system", "avg_sum_rate_bps",
                                self.per_trial_sum_rate(scheme, n)))
        return out

    def per_trial_sum_rate(self, scheme, n_femtos) -> np.ndarray:
        c = self.columns
        base = self.select(scheme=scheme, n_femtos=n_femtos)
        trials = np.unique(c["trial"][base])
        out = []
        for t in trials:
            m = base & (c["trial"] == t)
            rates = {cls: c["rate_bps"][m & (c["user_class"] == cls)] for cls in USER_CLASSES}
            out.append(metrics.average_sum_rate(metrics.UserClassRates(
                tuple(rates[MUE]), tuple(rates[INNER_FUE]), tuple(rates[EDGE_FUE]))))
        return np.array(out)


SUMMARY_COLUMNS = ("scheme", "n_femtos", "user_class", "metric", "mean", "ci95", "count")


def _agg(scheme: str, n: int, cls: str, metric: str, values: np.ndarray) -> dict:
    values = np.asarray(values, dtype=float)
    ci = 0.0
    if len(values) > 1:
        ci = 1.96 * float(values.std(ddof=1)) / math.sqrt(len(values))
    return {"scheme": scheme, "n_femtos": n, "user_class": cls, "metric": metric,
            "mean": float(values.mean()), "ci95": ci, "count": len(values)}


def trial_seeds(config: ExperimentConfig) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(config.seed).spawn(config.trials)


def run_trial(config: ExperimentConfig, seed_seq: np.random.SeedSequence, n_interferers: int,
              plan: SpectrumPlan | None = None) -> dict[Scheme, TrialResult]:
    """All configured schemes on one shared deployment."""
    plan = plan or config.plan()
    world = generate_deployment(config, np.random.default_rng(seed_seq), n_interferers)
    gains = link_gains(world, config)
    return {
        s: evaluate(world, apply_scheme(world, s, plan, config), config, gains=gains, plan=plan)
        for s in config.schemes
    }


def _run_block(args):
    config, n, start, seeds = args
    plan = config.plan()
    return [run_trial(config, ss, n, plan) for ss in seeds]


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run ``config.trials`` paired trials for every density and scheme.

    Trial ``t`` uses the ``t``-th child of the master seed for every density,
    so densities are nested and schemes share each draw.  With ``workers > 1``
    trials run in worker processes; output order does not depend on it.
    """
    config.validate()
    seeds = trial_seeds(config)
    jobs = []
    chunk = max(1, math.ceil(config.trials / (4 * config.workers)))
    for n in config.n_interfering_femtos:
        for start in range(0, config.trials, chunk):
            jobs.append((config, n, start, seeds[start:start + chunk]))
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as ex:
            blocks = list(ex.map(_run_block, jobs))
    else:
        blocks = [_run_block(j) for j in jobs]

    parts: dict[str, list] = {k: [] for k in RESULT_COLUMNS}
    mi, fi = [], []
    by_density: dict[int, list] = {}
    for (cfg, n, start, _), block in zip(jobs, blocks):
        by_density.setdefault(n, []).extend((start + k, res) for k, res in enumerate(block))
    for n in config.n_interfering_femtos:
        trials = by_density[n]
        for scheme in config.schemes:
            for t, res in trials:
                r = res[scheme]
                m = len(r.user_id)
                parts["scheme"].append(np.full(m, scheme.value, dtype=object))
                parts["n_femtos"].append(np.full(m, n))
                parts["trial"].append(np.full(m, t))
                parts["user_class"].append(r.user_class.astype(object))
                parts["user_id"].append(r.user_id)
                parts["sinr_db"].append(r.sinr_db)
                parts["rate_bps"].append(r.rate_bps)
                parts["outage_prob"].append(r.outage_prob)
                mi.append(r.macro_interf_w)
                fi.append(r.femto_interf_w)
    cols = {k: np.concatenate(v) for k, v in parts.items()}
    return ExperimentResult(config, cols, np.concatenate(mi), np.concatenate(fi))
