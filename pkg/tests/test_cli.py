import json

import pytest

from densitylab import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_count_both_methods(capsys):
    code, out, err = run(capsys, "count", "--level", "2", "--norm-bound", "10", "--method", "both")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "bound,count,reference,ratio"
    assert lines[-1].startswith("#config-hash=") and lines[-1].endswith(",#seed=0")
    assert "fast == brute: true" in err


def test_count_length_profile(capsys):
    code, out, err = run(capsys, "count", "--kind", "gamma0", "--level", "5",
                         "--length-bound", "0:4:2", "--method", "both")
    assert code == 0 and "direct == fixed-point: true" in err
    assert len(out.splitlines()) == 1 + 3 + 1


def test_exit_codes(capsys):
    assert run(capsys, "count", "--level", "0", "--norm-bound", "5")[0] == 2
    assert run(capsys, "count", "--level", "2", "--norm-bound", "5000")[0] == 3
    assert run(capsys, "count", "--level", "2", "--length-bound", "2", "--method", "fast")[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["count"])
    assert exc.value.code == 2


def test_tree_records_constant(capsys):
    code, out, err = run(capsys, "tree", "--q", "2", "--radius", "8", "--check-convolution")
    assert code == 0
    assert "convolution_constant = 2.9921875" in err
    assert out.splitlines()[0] == "d,count,bound,ratio"


def test_lift_and_xi(capsys):
    code, out, _ = run(capsys, "lift", "--level", "5")
    assert code == 0 and out.splitlines()[-2].endswith(",1.0")
    code, out, err = run(capsys, "--seed", "3", "xi", "--t", "1,2", "--samples", "5000")
    assert code == 0 and "within bounds: true" in err
    assert out.splitlines()[0] == "t,p,estimate,std_error,upper_bound,lower_bound"
    assert out.splitlines()[-1].endswith("#seed=3")


def test_xi_thread_independent(capsys):
    _, a, _ = run(capsys, "xi", "--t", "2", "--samples", "200000")
    _, b, _ = run(capsys, "--threads", "3", "xi", "--t", "2", "--samples", "200000")
    ra = [float(x) for x in a.splitlines()[1].split(",")]
    rb = [float(x) for x in b.splitlines()[1].split(",")]
    assert max(abs(x - y) for x, y in zip(ra, rb)) < 1e-9


def test_spectra_profile(capsys):
    code, out, err = run(capsys, "spectra", "--family", "cayley", "--params", "7", "--nb", "--profile")
    assert out.splitlines()[0] == "p,M,bound"
    assert code == 1  # Cayley(SL_2(F_7)) is not Ramanujan
    assert "adjacency Ramanujan: false" in err and "criteria agree: true" in err


def test_diameter_file(tmp_path, capsys):
    from densitylab import graphs
    path = tmp_path / "c10.txt"
    graphs.cycle_graph(10).to_edge_list(path)
    code, out, err = run(capsys, "diameter", "--graph-file", str(path))
    assert code == 0
    assert out.splitlines()[:3] == ["distance,pairs", "0,0", "1,20"]
    assert "mean = 2.77" in err


def test_out_dir_and_determinism(tmp_path, capsys):
    for sub in ("a", "b"):
        assert run(capsys, "--out-dir", str(tmp_path / sub), "count", "--level", "3",
                   "--norm-bound", "5,10,20", "--method", "both")[0] == 0
    a = (tmp_path / "a" / "count.csv").read_text()
    assert a == (tmp_path / "b" / "count.csv").read_text()
    rep = json.loads((tmp_path / "a" / "count.json").read_text())
    assert rep["checks"] == {"fast == brute": True}


def test_run_config(tmp_path, capsys):
    cfg = {"seed": 1, "experiments": [
        {"kind": "count", "level": 2, "norm_bound": 10, "method": "both"},
        {"kind": "tree", "q": 2, "radius": 8},
    ]}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, out, _ = run(capsys, "--out-dir", str(tmp_path / "out"), "run", str(path))
    assert code == 0
    rep = json.loads(out)
    assert "fast == brute: true" in rep["experiments"][0]["checks_text"]
    assert rep["experiments"][1]["constants"]["convolution_constant"] == pytest.approx(2.9921875)
    assert sorted(p.name for p in (tmp_path / "out").iterdir()) == ["00-count.csv", "01-tree.csv", "report.json"]


def test_run_empty_and_bad(tmp_path, capsys):
    path = tmp_path / "empty.json"
    path.write_text('{"experiments": []}')
    code, out, _ = run(capsys, "run", str(path))
    assert code == 0 and json.loads(out)["experiments"] == []
    path.write_text('{"experiments": [{"kind": "nope"}]}')
    assert run(capsys, "run", str(path))[0] == 2
    path.write_text('{"experiments": [{"kind": "count", "level": 2, "norm_bound": 99999}]}')
    code, _, err = run(capsys, "run", str(path))
    assert code == 3 and "experiment 0 (count)" in err


def test_grid_parser():
    assert cli._grid("1:3", int) == [1, 2, 3]
    assert cli._grid("0:1:0.5") == [0.0, 0.5, 1.0]
    assert cli._grid("2,5", int) == [2, 5]
