import json

import pytest

import qakh


def test_torus_2_5_regimes():
    generic = qakh.poincare("torus 2 5", ring="Q", q="3")
    assert generic == {(0, -5, -2): 1, (0, -5, 0): 1, (0, -5, 2): 1, (-5, -15, 0): 1}
    f5 = qakh.poincare("torus 2 5", ring="F5", q="2")
    assert f5[(-3, -9, 0)] == 1 and f5[(-4, -13, 0)] == 1
    assert sum(f5.values()) == 8


def test_pipelines_agree():
    for word in ["strands: 3 p1 p2 p1 p2", "torus 2 3", "strands: 1 u2 p1 a2"]:
        a = qakh.homology(word, ring="F7", q="3", pipeline="tqft")
        b = qakh.homology(word, ring="F7", q="3", pipeline="hochschild")
        assert a == b


def test_closed_form_matches():
    for n in range(1, 5):
        for ring, q in [("Q", "3"), ("Q", "1"), ("F5", "2")]:
            assert qakh.homology(f"torus 2 {n}", ring=ring, q=q) == qakh.torus_closed_form(n, ring, q)


def test_arc_algebra():
    assert [qakh.arc_algebra_dimension(n) for n in range(4)] == [1, 2, 7, 20]
    assert qakh.coinvariant_rank(2, ring="F5", q="2") == 4
    assert qakh.coinvariant_rank(2, twisted=True, ring="F5", q="2") == 2


def test_errors():
    with pytest.raises(qakh.ParseError):
        qakh.homology("p1 x2")
    with pytest.raises(qakh.RingError):
        qakh.homology("p1", ring="F6")


def test_cli_json():
    code, out, err = qakh.cli(["homology", "--word", "p1 p1", "--output", "json"])
    assert code == 0, err
    doc = json.loads(out)
    assert doc["verdict"] == "MATCH"
    assert {"i", "j", "k", "rank", "torsion"} <= set(doc["homology"][0])


def test_selftest_subset():
    res = qakh.selftest(quick=True, only=[6, 8])
    assert [r["id"] for r in res] == [6, 8]
    assert all(r["pass"] for r in res)
