import json

import pytest

from primeends import RegionSet, ball, build_gallery
from primeends.cli import main
from primeends.serialize import save_chain, save_region
from primeends import examples


def test_gallery_list(capsys):
    assert main(["gallery", "list"]) == 0
    out = capsys.readouterr().out
    assert "slit_disk" in out and "topologist_comb" in out
    assert len(out.strip().splitlines()) == 11


def test_gallery_build_deterministic(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    assert main(["gallery", "build", "slit_disk", "--h", "0.02",
                 "--out", str(out1)]) == 0
    assert main(["gallery", "build", "slit_disk", "--h", "0.02",
                 "--out", str(out2)]) == 0
    j1 = (out1 / "slit_disk.json").read_bytes()
    j2 = (out2 / "slit_disk.json").read_bytes()
    assert j1 == j2
    assert (out1 / "slit_disk.svg").exists()


def test_gallery_build_unknown(tmp_path, capsys):
    assert main(["gallery", "build", "warped_torus", "--out", str(tmp_path)]) == 2


def test_analyze_slit_point(tmp_path, capsys):
    assert main(["analyze", "slit_disk", "--h", "0.01", "--point=-0.5,0",
                 "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "analyze.json").read_text())
    assert report["prime_ends"]["count"] == 2
    assert report["connectedness"]["verdict"] == "finitely_connected"
    assert (tmp_path / "witness_path.svg").exists()
    assert (tmp_path / "witness_path.csv").exists()


def test_analyze_inaccessible(tmp_path):
    assert main(["analyze", "topologist_comb", "--h", str(2.0 ** -8),
                 "--depth", "6", "--point", "0.75,0",
                 "--out", str(tmp_path)]) in (0, 3)
    report = json.loads((tmp_path / "analyze.json").read_text())
    assert report["accessible"] is False
    assert report["prime_ends"]["count"] == 0


def test_modulus_and_decay_commands(tmp_path):
    dom = build_gallery("unit_square", 1 / 64)
    E = RegionSet.from_rect(dom, 0.1, 0.3, 0.1, 0.3)
    F = RegionSet.from_rect(dom, 0.7, 0.9, 0.7, 0.9)
    save_region(tmp_path / "E.json", E)
    save_region(tmp_path / "F.json", F)
    assert main(["modulus", "unit_square", "--h", str(1 / 64),
                 "--plates", str(tmp_path / "E.json"), str(tmp_path / "F.json"),
                 "--p", "2", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "modulus.json").read_text())
    assert rep["value"] > 0
    assert (tmp_path / "potential.svg").exists()

    chain = examples.unit_square_bottom_balls(dom, 5)
    save_chain(tmp_path / "chain.json", chain)
    K = ball(dom, (0.5, 0.7), 0.1)
    save_region(tmp_path / "K.json", K)
    assert main(["decay", "unit_square", "--h", str(1 / 64),
                 "--chain", str(tmp_path / "chain.json"),
                 "--K", str(tmp_path / "K.json"),
                 "--p", "2", "--out", str(tmp_path)]) == 0
    rep2 = json.loads((tmp_path / "decay.json").read_text())
    assert rep2["verdict"] in ("decays", "stalls")
    assert (tmp_path / "decay_series.csv").exists()


def test_maz_distance_command(tmp_path):
    assert main(["mazurkiewicz", "slit_disk", "distance", "--a=-0.5,0.02",
                 "--b=-0.5,-0.02", "--h", "0.01", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "maz_distance.json").read_text())
    assert rep["value"] >= 0.98


def test_maz_boundary_command(tmp_path):
    assert main(["mazurkiewicz", "unit_square", "boundary", "--h", str(1 / 64),
                 "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "maz_boundary.json").read_text())
    assert len(rep["clusters"]) > 10
    assert (tmp_path / "atlas.svg").exists()


def test_john_commands(tmp_path):
    assert main(["john", "unit_square", "assess", "--h", str(1 / 64),
                 "--center", "0.5,0.5", "--samples", "6",
                 "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "john_assess.json").read_text())
    assert rep["verdict"] == "john"
    assert main(["john", "unit_square", "chain", "--h", str(1 / 64),
                 "--center", "0.5,0.5", "--target", "0.5,0.1",
                 "--out", str(tmp_path)]) == 0
    rep2 = json.loads((tmp_path / "john_chain.json").read_text())
    assert all(rep2["checks_passed"].values())


def test_regress_subset(tmp_path):
    report = tmp_path / "r.json"
    code = main(["regress", "--only", "c14", "--report", str(report)])
    assert code == 0
    rep = json.loads(report.read_text())
    assert rep["criteria"][0]["cid"] == "c14"
    assert rep["criteria"][0]["passed"] is True


def test_version(capsys):
    with pytest.raises(SystemExit):
        main(["--version"])
