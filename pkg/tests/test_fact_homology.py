import itertools
import json
from fractions import Fraction

import pytest

from bvtwist.dg_lie import abelian, preset
from bvtwist.fact_homology import (ManifoldData, classical_observable_dims, compactification_algebra,
                                   det_line_at_vacuum, det_line_degree, load_catalogue, manifold,
                                   manifold_cdga, shift_coefficient)
from bvtwist.vacua import catalogue_point
from bvtwist.weyl_dot import dot_check, oracle_sweep

# frozen from an independent evaluation (see oracle_d_M below)
FROZEN_D_M = {
    "S4": (-2, -6, -16), "T4": (8, 24, 64), "S2xS2": (-4, -12, -32), "CP2": (-3, -9, -24),
    "K3": (-24, -72, -192), "T4-complex": (8, 24, 64), "Hopf": (2, 6, 16),
}
ALGEBRAS = ("abelian:1", "sl2", "sl3")


def oracle_d_M(betti, dim_g):
    # c_k rewritten as (-1)^(k+1) (k - 1/2) + 1/2; g concentrated in degree 0
    total = Fraction(0)
    for k, b in enumerate(betti):
        total += b * dim_g * ((-1) ** (k + 1) * (k - Fraction(1, 2)) + Fraction(1, 2))
    return int(total)


def test_shift_coefficients_are_odd():
    assert [shift_coefficient(k) for k in range(5)] == [1, 1, -1, 3, -3]


@pytest.mark.parametrize("name", sorted(FROZEN_D_M))
def test_det_line_values(name):
    M = manifold(name)
    for alg, want in zip(ALGEBRAS, FROZEN_D_M[name]):
        g = preset(alg)
        res = det_line_degree(M, g)
        assert res.d_M == want == oracle_d_M(M.betti, g.dim)
        assert res.parity_ok
        assert res.total_rank == sum(M.betti) * g.dim


def test_dolbeault_reports_both_parities():
    res = det_line_degree(manifold("Hopf"), preset("sl2"))
    d = res.as_dict()
    assert "holomorphic_euler_parity" in d and d["parities_disagree"] is False


def test_det_line_at_vacuum_uses_centralizer():
    p, _ = catalogue_point("gl3", "regular-semisimple")
    res = det_line_at_vacuum(manifold("CP2"), p)
    assert res.d_M == oracle_d_M((1, 0, 1, 0, 1), 3)


@pytest.mark.parametrize("name", ["S3", "T2", "S2"])
def test_det_line_needs_four_manifold(name):
    with pytest.raises(ValueError):
        det_line_degree(manifold(name), preset("sl2"))


def test_catalogue_validation():
    cat = load_catalogue()
    assert {"S4", "T4", "K3", "Hopf", "T4-complex"} <= set(cat)
    with pytest.raises(ValueError):
        ManifoldData("bad", 2, "deRham", (1, 0, 1), 3)
    with pytest.raises(ValueError):
        ManifoldData("bad", 2, "deRham", (1, 0, 1), 2, pairing=((1, 0), (0, 1)))
    with pytest.raises(ValueError):
        ManifoldData("bad", 1, "Dolbeault", (1, 1), 0, hodge=((1, 1),) * 1 + ((1, 0),))
    with pytest.raises(KeyError, match="catalogue"):
        manifold("RP4")


def test_unoriented_and_inadmissible_rejected():
    rp4 = ManifoldData("RP4", 4, "deRham", (1, 0, 0, 0, 0), 1, oriented=False)
    with pytest.raises(ValueError):
        det_line_degree(rp4, preset("sl2"))
    surf = ManifoldData("X", 4, "Dolbeault", (1, 0, 0, 0, 1), 2, hodge=((1, 0, 0), (0, 0, 0), (0, 0, 1)))
    with pytest.raises(ValueError):
        det_line_degree(surf, preset("sl2"))


def test_env_override(tmp_path, monkeypatch):
    doc = {"manifolds": [{"name": "Pt4", "dim": 4, "flavor": "deRham", "betti": [1, 0, 0, 0, 0], "chi": 1}]}
    (tmp_path / "manifolds.json").write_text(json.dumps(doc))
    monkeypatch.setenv("BVTWIST_CATALOGUE", str(tmp_path))
    cat = load_catalogue()
    assert set(cat) == {"Pt4"}
    assert det_line_degree(cat["Pt4"], preset("sl2")).d_M == 3


def brute_observables(field_degrees, cap):
    coords = [-d for d in field_degrees]
    out = {}
    for w in range(cap + 1):
        for combo in itertools.combinations_with_replacement(range(len(coords)), w):
            if any(combo.count(i) > 1 and coords[i] % 2 for i in set(combo)):
                continue
            key = (w, sum(coords[i] for i in combo))
            out[key] = out.get(key, 0) + 1
    return out


@pytest.mark.parametrize("name,alg", [("S4", "sl2"), ("CP2", "abelian:2"), ("S2xS2", "sl2")])
def test_observable_dims_match_brute_count(name, alg):
    M, g = manifold(name), preset(alg)
    res = classical_observable_dims(M, g, weight_cap=3)
    degs = []
    for k, b in enumerate(M.betti):
        degs += [k - 1] * (b * g.dim) + [k - 2] * (b * g.dim)
    assert res["field_degrees"] == sorted(degs)
    assert res["table"] == brute_observables(degs, 3)
    assert res["label"] == ("exact" if alg.startswith("abelian") else "E1 page of augmentation filtration")


def test_observable_window():
    res = classical_observable_dims(manifold("S4"), preset("sl2"), degree_window=(0, 2), weight_cap=2)
    assert all(0 <= deg <= 2 for _, deg in res["table"])


def test_manifold_cdga():
    assert manifold_cdga(manifold("S1xS2")).check().passed
    with pytest.raises(ValueError):
        manifold_cdga(manifold("K3"))


def test_abelian_compactification_S3():
    D = compactification_algebra(manifold("S3"), abelian(1), cap=4)
    assert dot_check(D).passed
    count, bad = oracle_sweep(D.weyl)
    assert count > 0 and not bad


def test_abelian_compactification_T3():
    D = compactification_algebra(manifold("T3"), abelian(1), cap=4)
    assert dot_check(D).passed
    _, bad = oracle_sweep(D.weyl)
    assert not bad


def test_nonabelian_compactification_S3():
    D = compactification_algebra(manifold("S3"), preset("sl2"), cap=3)
    assert dot_check(D).passed
    assert all(D.first_page["square_zero"].values())
    assert D.weyl is None or D.notes


def test_compactification_rejects_wrong_dimension():
    with pytest.raises(ValueError):
        compactification_algebra(manifold("S4"), abelian(1))
