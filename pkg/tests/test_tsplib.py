import math

import numpy as np
import pytest

from tsphyb.tsplib import (
    ParseError,
    UnsupportedMetricError,
    build_matrix,
    build_neighbors,
    edge_weight,
    emit_canonical,
    instance_from_coords,
    parse_instance,
    read_tour,
)

MINI = """NAME : mini
TYPE : TSP
DIMENSION : 3
EDGE_WEIGHT_TYPE : EUC_2D
NODE_COORD_SECTION
1 0 0
2 3 0
3 0 4
EOF
"""


def test_parse_minimal_document():
    inst = parse_instance(MINI)
    assert inst.n == 3
    assert inst.name == "mini"
    assert inst.dist[1, 2] == 5  # 3-4-5 triangle
    assert inst.dist[0, 1] == 3 and inst.dist[0, 2] == 4


def test_parse_berlin52(berlin52):
    assert berlin52.n == 52
    assert berlin52.metric == "EUC_2D"


def test_dimension_mismatch_is_error():
    doc = MINI.replace("DIMENSION : 3", "DIMENSION : 5")
    with pytest.raises(ParseError, match="NODE_COORD_SECTION has 3"):
        parse_instance(doc)


def test_duplicate_node_id_is_error():
    doc = MINI.replace("2 3 0", "1 3 0")
    with pytest.raises(ParseError, match="duplicate node id"):
        parse_instance(doc)


def test_unsupported_metric_is_error():
    doc = MINI.replace("EUC_2D", "EXPLICIT")
    with pytest.raises(UnsupportedMetricError):
        parse_instance(doc)


def test_missing_keywords_are_errors():
    with pytest.raises(ParseError):
        parse_instance(MINI.replace("NAME : mini\n", ""))
    with pytest.raises(ParseError):
        parse_instance(MINI.replace("EDGE_WEIGHT_TYPE : EUC_2D\n", ""))


def test_euc2d_rounding():
    assert edge_weight((0, 0), (3, 4), "EUC_2D") == 5
    # nearest-int rule: sqrt(2) = 1.414... rounds down
    assert edge_weight((0, 0), (1, 1), "EUC_2D") == 1
    assert edge_weight((0, 0), (1, 2), "EUC_2D") == 2  # sqrt(5) = 2.236


def test_ceil2d():
    assert edge_weight((0, 0), (1, 1), "CEIL_2D") == 2
    assert edge_weight((0, 0), (3, 4), "CEIL_2D") == 5  # exact hypotenuse


def test_att_reference_rule():
    # r = sqrt(25/10) = 1.5811; nint -> 2 >= r so keep 2
    assert edge_weight((0, 0), (3, 4), "ATT") == 2
    # r = sqrt(200/10) = 4.4721; nint -> 4 < r so bump to 5
    assert edge_weight((0, 0), (10, 10), "ATT") == 5


def _geo_oracle(a, b):
    # independent transcription of the documented geographical formula
    pi = 3.141592

    def rad(v):
        deg = math.floor(v + 0.5)
        return pi * (deg + 5.0 * (v - deg) / 3.0) / 180.0

    la1, lo1 = rad(a[0]), rad(a[1])
    la2, lo2 = rad(b[0]), rad(b[1])
    q1 = math.cos(lo1 - lo2)
    q2 = math.cos(la1 - la2)
    q3 = math.cos(la1 + la2)
    return int(6378.388 * math.acos(0.5 * ((1 + q1) * q2 - (1 - q1) * q3)) + 1.0)


def test_geo_against_independent_transcription():
    rng = np.random.default_rng(3)
    pts = np.column_stack(
        (rng.uniform(-80, 80, 30), rng.uniform(-179, 179, 30))
    )
    for i in range(0, 30, 2):
        a, b = pts[i], pts[i + 1]
        assert edge_weight(a, b, "GEO") == _geo_oracle(a, b)


@pytest.mark.parametrize("metric", ["EUC_2D", "CEIL_2D", "ATT", "GEO"])
def test_matrix_matches_scalar_weights(metric):
    rng = np.random.default_rng(9)
    if metric == "GEO":
        coords = np.column_stack(
            (rng.uniform(-60, 60, 12), rng.uniform(-120, 120, 12))
        )
    else:
        coords = rng.integers(0, 500, size=(12, 2)).astype(float)
    dist = build_matrix(coords, metric)
    for i in range(12):
        for j in range(12):
            expect = 0 if i == j else edge_weight(coords[i], coords[j], metric)
            assert dist[i, j] == expect


def test_matrix_invariants(berlin52):
    d = berlin52.dist
    assert np.array_equal(d, d.T)
    assert (np.diag(d) == 0).all()
    assert (d >= 0).all()


def test_neighbors_tiny_forced_case():
    inst = instance_from_coords("tri", [(0, 0), (3, 0), (0, 4)])
    assert inst.neighbors[0].tolist() == [1, 2]  # dist 3 < 4


def test_neighbors_tie_break_by_index():
    # square: each city has two equidistant neighbours
    inst = instance_from_coords("sq", [(0, 0), (10, 0), (10, 10), (0, 10)])
    assert inst.neighbors[0].tolist() == [1, 3, 2]
    assert inst.neighbors[2].tolist() == [1, 3, 0]


def test_neighbors_against_argsort_oracle(rand_instance):
    inst = rand_instance(8, seed=17)
    for i in range(8):
        pairs = sorted(
            ((inst.dist[i, j], j) for j in range(8) if j != i),
        )
        assert inst.neighbors[i].tolist() == [j for _, j in pairs]


def test_neighbors_sorted_nondecreasing(kroa100):
    for i in range(0, 100, 7):
        row = kroa100.dist[i, kroa100.neighbors[i]]
        assert (np.diff(row) >= 0).all()


def test_canonical_roundtrip(berlin52):
    again = parse_instance(emit_canonical(berlin52))
    assert again == berlin52
    assert np.array_equal(again.dist, berlin52.dist)
    assert np.array_equal(again.neighbors, berlin52.neighbors)


def test_canonical_roundtrip_float_coords():
    inst = instance_from_coords("f", [(0.5, 1.25), (3.125, 0.0), (7.75, 2.5)])
    again = parse_instance(emit_canonical(inst))
    assert np.array_equal(again.coords, inst.coords)


def test_read_tour():
    doc = "NAME : x\nTYPE : TOUR\nTOUR_SECTION\n1\n3\n2\n-1\nEOF\n"
    assert read_tour(doc).tolist() == [0, 2, 1]
    with pytest.raises(ParseError):
        read_tour("TYPE : TOUR\nTOUR_SECTION\n-1\n")


def test_too_small_instance_rejected():
    with pytest.raises(ParseError):
        instance_from_coords("tiny", [(0, 0), (1, 1)])
