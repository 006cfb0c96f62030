from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from femtodfr.spectrum import (
    AXIS_ORDER,
    Band,
    BandSet,
    SpectrumPlan,
    build_plan,
    edge_subbands,
    femto_pool,
    inner_subbands,
    split_evenly,
    verify_partition,
    width_identities,
)

MHZ = 1e6


@pytest.fixture
def plan():
    return build_plan(10 * MHZ, 2 * MHZ)


def widths(plan, sets):
    return [plan.width_hz(s) for s in sets]


def pairwise_disjoint(sets):
    return all(a.isdisjoint(b) for i, a in enumerate(sets) for b in sets[i + 1:])


def union(sets):
    out = BandSet()
    for s in sets:
        out = out | s
    return out


# -- build_plan -------------------------------------------------------------

def test_build_plan_default_widths(plan):
    assert plan.total_hz == pytest.approx(36 * MHZ, rel=1e-12)
    m4, m5, m6 = plan.inner_thirds(1)
    for t in (m4, m5, m6):
        assert plan.width_hz(t) == pytest.approx(20 * MHZ / 3, rel=1e-12)


def test_build_plan_unit_widths():
    assert build_plan(1, 1).total_hz == 6


@pytest.mark.parametrize("macro, guard", [(10 * MHZ, 0), (0, 2 * MHZ), (-1, 1), (1, -1e-9)])
def test_build_plan_rejects_non_positive(macro, guard):
    with pytest.raises(ValueError):
        build_plan(macro, guard)


def test_band_order_follows_frequency_axis(plan):
    lows = [plan.band(n).low_hz for n in AXIS_ORDER]
    assert lows == sorted(lows)
    for a, b in zip(AXIS_ORDER, AXIS_ORDER[1:]):
        assert plan.band(a).high_hz == plan.band(b).low_hz


def test_band_rejects_zero_width():
    with pytest.raises(ValueError):
        Band("X", 0.0, 0.0)


# -- BandSet algebra --------------------------------------------------------

def _member(bs: BandSet, base: str, x: Fraction) -> bool:
    return any(s.base == base and s.start <= x < s.stop for s in bs.segments)


fractions = st.fractions(min_value=0, max_value=1, max_denominator=12)


@st.composite
def bandsets(draw):
    segs = []
    for _ in range(draw(st.integers(0, 4))):
        base = draw(st.sampled_from(AXIS_ORDER))
        a, b = sorted((draw(fractions), draw(fractions)))
        if a < b:
            segs.append((base, a, b))
    return BandSet.part(*segs[0]) if len(segs) == 1 else union(
        [BandSet.part(*s) for s in segs])


@settings(max_examples=200, deadline=None)
@given(bandsets(), bandsets())
def test_set_algebra_matches_pointwise_membership(a, b):
    # membership only changes at segment endpoints, so probing every endpoint
    # and every midpoint between neighbouring endpoints is exhaustive
    cuts = sorted({Fraction(0), Fraction(1)} | {
        e for s in a.segments + b.segments for e in (s.start, s.stop)})
    probes = cuts + [(p + q) / 2 for p, q in zip(cuts, cuts[1:])]
    for base in AXIS_ORDER:
        for x in probes:
            ia, ib = _member(a, base, x), _member(b, base, x)
            assert _member(a | b, base, x) == (ia or ib)
            assert _member(a & b, base, x) == (ia and ib)
            assert _member(a - b, base, x) == (ia and not ib)


def test_bandset_equality_is_structural():
    half = Fraction(1, 2)
    assert BandSet.part("X", 0, half) | BandSet.part("X", half, 1) == BandSet.of("X")
    assert hash(BandSet.of("Y", "Z")) == hash(BandSet.of("Z", "Y"))
    assert BandSet.of("X").label == "X"
    assert (BandSet.of("Y") | BandSet.part("X", half, 1)).label == "X[1/2:1]+Y"


# -- femto_pool -------------------------------------------------------------

def test_femto_pool_macro1(plan):
    pool = femto_pool(plan, 1)
    assert pool == BandSet.of("m2", "m3", "X", "Y", "Z")
    assert plan.width_hz(pool) == pytest.approx(26 * MHZ)


def test_femto_pool_macro2(plan):
    assert femto_pool(plan, 2) == BandSet.of("m1", "m3", "X", "Y", "Z")


@pytest.mark.parametrize("i", [1, 2, 3])
def test_femto_pool_partitions_total(plan, i):
    pool = femto_pool(plan, i)
    assert pool.isdisjoint(plan.macro(i))
    assert pool | plan.macro(i) == plan.total


def test_femto_pool_rejects_bad_macro(plan):
    with pytest.raises(ValueError):
        femto_pool(plan, 4)


# -- edge / inner sub-bands ------------------------------------------------

def test_edge_group_of_three(plan):
    assert edge_subbands(plan, 1, 3) == [BandSet.of("X"), BandSet.of("Y"), BandSet.of("Z")]
    assert widths(plan, edge_subbands(plan, 1, 3)) == pytest.approx([2 * MHZ] * 3)


def test_edge_group_of_two(plan):
    a, b = edge_subbands(plan, 1, 2)
    assert a == BandSet.of("Y") | BandSet.part("X", Fraction(1, 2), 1)
    assert b == BandSet.of("Z") | BandSet.part("X", 0, Fraction(1, 2))
    assert widths(plan, [a, b]) == pytest.approx([3 * MHZ, 3 * MHZ])


def test_edge_single(plan):
    (only,) = edge_subbands(plan, 1, 1)
    assert only == BandSet.of("Y", "Z")
    assert plan.width_hz(only) == pytest.approx(4 * MHZ)


def test_inner_single(plan):
    (only,) = inner_subbands(plan, 1, 1)
    assert only == BandSet.of("m2", "m3")
    assert plan.width_hz(only) == pytest.approx(20 * MHZ)


def test_inner_pair(plan):
    assert inner_subbands(plan, 1, 2) == [BandSet.of("m2"), BandSet.of("m3")]


def test_inner_thirds_tile_neighbour_pool(plan):
    parts = inner_subbands(plan, 1, 3)
    assert widths(plan, parts) == pytest.approx([20 * MHZ / 3] * 3, rel=1e-12)
    assert pairwise_disjoint(parts)
    assert union(parts) == BandSet.of("m2", "m3")


@pytest.mark.parametrize("fn", [edge_subbands, inner_subbands])
@pytest.mark.parametrize("g", [0, 4, -1])
def test_group_size_outside_range(plan, fn, g):
    with pytest.raises(ValueError):
        fn(plan, 1, g)


@pytest.mark.parametrize("macro", [1, 2, 3])
@pytest.mark.parametrize("g", [1, 2, 3])
def test_conservation(plan, macro, g):
    edge = edge_subbands(plan, macro, g)
    assert pairwise_disjoint(edge)
    inner = inner_subbands(plan, macro, g)
    assert pairwise_disjoint(inner)
    assert union(inner) == femto_pool(plan, macro) - plan.guard_set
    if g == 3:
        assert union(edge) == plan.guard_set
    # sizes 1 and 2 leave the lowest-priority band (or half of it) unused
    expected_width = {1: 4, 2: 6, 3: 6}[g] * MHZ
    assert plan.width_hz(union(edge)) == pytest.approx(expected_width)


@pytest.mark.parametrize("macro", [2, 3])
@pytest.mark.parametrize("g", [1, 2, 3])
def test_rotation_symmetry(plan, macro, g):
    steps = macro - 1
    assert edge_subbands(plan, macro, g) == [b.rotated(steps) for b in edge_subbands(plan, 1, g)]
    assert inner_subbands(plan, macro, g) == [
        b.rotated(steps) for b in inner_subbands(plan, 1, g)]


def test_priority_property(plan):
    (single,) = edge_subbands(plan, 1, 1)
    assert single.isdisjoint(BandSet.of("X"))
    for share in edge_subbands(plan, 1, 2):
        assert plan.width_hz(share & BandSet.of("X")) == pytest.approx(1 * MHZ)


@pytest.mark.parametrize("parts", [1, 4, 7, 16, 41])
def test_split_evenly(plan, parts):
    pool = ("Y", "Z", "X")
    slices = split_evenly(plan, pool, parts)
    assert len(slices) == parts
    assert pairwise_disjoint(slices)
    assert union(slices) == BandSet.of(*pool)
    for w in widths(plan, slices):
        assert w == pytest.approx(6 * MHZ / parts, rel=1e-12)


# -- verify_partition -------------------------------------------------------

def test_verify_partition_default(plan):
    report = verify_partition(plan)
    assert len(report) == 6
    assert all(report.values())


def test_verify_partition_detects_overlap():
    good = build_plan(10 * MHZ, 2 * MHZ)
    m = good.macro_bands
    x = Band("X", m[0].high_hz - 1 * MHZ, 2 * MHZ)  # slides into m1
    bad = SpectrumPlan(m, (x,) + good.guard_bands[1:], good.total_hz)
    report = verify_partition(bad)
    assert not report["m1_disjoint"]


def test_verify_partition_detects_bad_total():
    good = build_plan(10 * MHZ, 2 * MHZ)
    bad = SpectrumPlan(good.macro_bands, good.guard_bands, good.total_hz - 2 * MHZ)
    report = verify_partition(bad)
    assert not any(report[f"m{i}_union"] for i in (1, 2, 3))
    assert all(report[f"m{i}_disjoint"] for i in (1, 2, 3))


positive_widths = st.floats(min_value=1.0, max_value=1e8, allow_nan=False)


@settings(max_examples=150, deadline=None)
@given(st.tuples(positive_widths, positive_widths, positive_widths),
       st.tuples(positive_widths, positive_widths, positive_widths),
       st.floats(min_value=0, max_value=3e9))
def test_partition_property_random_plans(macro_w, guard_w, low):
    plan = build_plan(macro_w, guard_w, low)
    assert all(verify_partition(plan).values())
    for lhs, rhs in width_identities(plan).values():
        assert lhs == pytest.approx(rhs, rel=1e-9)
