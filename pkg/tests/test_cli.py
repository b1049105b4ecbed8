import json

import pytest

from rentlens.cli import main, read_arch
from rentlens.errors import ArchFileError
from rentlens.packer import ArchSpec

FAST = ["--restarts", "2"]


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert main(["gen", "--blocks", "128", "--rent", "0.6", "--seed", "1", "--out", str(d / "a.blif")]) == 0
    assert main(["gen", "--blocks", "128", "--rent", "0.6", "--seed", "2", "--out", str(d / "other.blif")]) == 0
    for util in ("1.0", "0.4"):
        assert main(["pack", "--blif", str(d / "a.blif"), "--pin-util", util, "--out", str(d / f"a{util}.net")]) == 0
    assert main(["pack", "--blif", str(d / "other.blif"), "--out", str(d / "other.net")]) == 0
    return d


def analyze(work, net, *extra):
    out = work / f"{net}.json"
    code = main(["analyze", "--blif", str(work / "a.blif"), "--net", str(work / net), "--json", str(out), *FAST, *extra])
    return code, out


def test_gen_is_reproducible(work):
    again = work / "again.blif"
    assert main(["gen", "--blocks", "128", "--rent", "0.6", "--seed", "1", "--out", str(again)]) == 0
    assert again.read_bytes() == (work / "a.blif").read_bytes()


def test_gen_rejects_bad_rent(work, capsys):
    assert main(["gen", "--blocks", "64", "--rent", "1.5", "--out", str(work / "bad.blif")]) == 2
    assert "target_r" in capsys.readouterr().err


def test_pack_util_zero_diagnostic(work, capsys):
    assert main(["pack", "--blif", str(work / "a.blif"), "--pin-util", "0", "--out", str(work / "z.net")]) == 0
    assert "singleton" in capsys.readouterr().err


def test_analyze_report(work, capsys):
    code, out = analyze(work, "a1.0.net", "--csv", str(work / "p.csv"), "--svg", str(work / "p.svg"))
    assert code == 0
    doc = json.loads(out.read_text())
    assert "D_R" in doc["metrics"]
    assert doc["inputs"] == {"blif": "a.blif", "net": "a1.0.net"}
    assert "workers" not in json.dumps(doc["config"])
    assert (work / "p.csv").read_text().startswith("region,depth,B,T,weight\n")
    assert (work / "p.svg").read_bytes().startswith(b"<?xml")
    assert "D_R" in capsys.readouterr().out


def test_analyze_json_to_stdout(work, capsys):
    assert main(["analyze", "--blif", str(work / "a.blif"), "--json", "-", *FAST]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc["metrics"]) == {"t", "r_prepack"}


def test_analyze_thread_invariance(work, monkeypatch):
    monkeypatch.setenv("RENTLENS_THREADS", "1")
    _, out = analyze(work, "a0.4.net")
    one = out.read_bytes()
    monkeypatch.setenv("RENTLENS_THREADS", "8")
    _, out = analyze(work, "a0.4.net")
    assert out.read_bytes() == one


def test_missing_file(work, capsys):
    assert main(["analyze", "--blif", str(work / "nope.blif")]) == 2
    assert "nope.blif" in capsys.readouterr().err


def test_bad_blif_and_net(work, capsys):
    (work / "broken.blif").write_text(".model x\n.inputs a\n")
    assert main(["analyze", "--blif", str(work / "broken.blif")]) == 2
    (work / "broken.net").write_text("<block")
    assert main(["analyze", "--blif", str(work / "a.blif"), "--net", str(work / "broken.net")]) == 2


def test_analysis_error_exit_code(work, capsys):
    (work / "wires.blif").write_text(".model w\n.inputs a\n.outputs a\n.end\n")
    assert main(["analyze", "--blif", str(work / "wires.blif")]) == 3


def test_compare_directions(work, capsys):
    _, hi = analyze(work, "a1.0.net")
    _, lo = analyze(work, "a0.4.net")
    capsys.readouterr()
    out = work / "cmp.json"
    assert main(["compare", "--reports", str(hi), str(lo), "--labels", "u1", "u04",
                 "--json", str(out), "--svg", str(work / "cmp.svg")]) == 0
    rows = {r["metric"]: r for r in json.loads(out.read_text())["rows"]}
    d_hi = json.loads(hi.read_text())["metrics"]["D_R"]
    d_lo = json.loads(lo.read_text())["metrics"]["D_R"]
    assert (rows["D_R"]["u1"], rows["D_R"]["u04"]) == (d_hi, d_lo)
    assert rows["D_R"]["delta"] == pytest.approx(d_lo - d_hi)
    assert "D_R" in capsys.readouterr().out


def test_compare_identical_zero_deltas(work):
    out = work / "same.json"
    args = ["compare", "--a", str(work / "a.blif"), str(work / "a1.0.net"),
            "--b", str(work / "a.blif"), str(work / "a1.0.net"), "--json", str(out), *FAST]
    assert main(args) == 0
    assert all(r["delta"] == 0 for r in json.loads(out.read_text())["rows"])


def test_compare_mismatched_prepack(work, capsys):
    args = ["compare", "--a", str(work / "a.blif"), str(work / "a1.0.net"),
            "--b", str(work / "other.blif"), str(work / "other.net"), *FAST]
    assert main(args) == 2
    assert "different pre-packing" in capsys.readouterr().err


def test_partition_points(work, capsys):
    pts = work / "pts.csv"
    assert main(["partition", "--blif", str(work / "a.blif"), "--points", str(pts), *FAST]) == 0
    assert "r=" in capsys.readouterr().out
    assert len(pts.read_text().splitlines()) > 3


def test_arch_file(tmp_path):
    f = tmp_path / "arch.txt"
    f.write_text("# small CLB\ncluster_capacity = 4\ncluster_inputs=12\n")
    assert read_arch(str(f)) == ArchSpec(4, 12, 10, 1)
    f.write_text("lut_size = 6\n")
    with pytest.raises(ArchFileError):
        read_arch(str(f))


def test_usage_error_exit_code(capsys):
    assert main(["frobnicate"]) == 2
