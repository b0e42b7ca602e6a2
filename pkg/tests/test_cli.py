import json

import numpy as np
import pytest

from scatteropt.cli import main, parse_float_list, parse_int_pair, parse_range_step, parse_samplers
from scatteropt.sampling import SamplerKind


@pytest.fixture()
def csv_file(tmp_path):
    rng = np.random.default_rng(0)
    rows = ["x,y"] + [f"{x},{y}" for x, y in rng.random((60, 2))]
    path = tmp_path / "points.csv"
    path.write_text("\n".join(rows) + "\n")
    return path


class TestParsers:
    def test_range_step(self):
        assert parse_range_step("0.05:0.2:0.05") == [0.05, 0.1, 0.15, 0.2]
        assert parse_range_step("0.5:0.5:0.1") == [0.5]

    def test_range_step_rejects_bad(self):
        with pytest.raises(ValueError):
            parse_range_step("0.9:0.1:0.05")
        with pytest.raises(ValueError):
            parse_range_step("0.1:0.9:0")

    def test_float_list(self):
        assert parse_float_list("20,40") == [20.0, 40.0]

    def test_int_pair(self):
        assert parse_int_pair("5:10") == (5, 10)

    def test_samplers(self):
        assert parse_samplers("all") == list(SamplerKind)
        assert parse_samplers("random,z_order") == [SamplerKind.RANDOM, SamplerKind.Z_ORDER]


class TestLoad:
    def test_load_registers(self, csv_file, tmp_path, capsys):
        code = main(
            ["load", "--data", str(csv_file), "--x-col", "x", "--y-col", "y", "--data-dir", str(tmp_path / "reg")]
        )
        assert code == 0
        assert "n=60" in capsys.readouterr().out

    def test_missing_file_is_data_error(self, tmp_path):
        code = main(["load", "--data", str(tmp_path / "no.csv"), "--x-col", "x", "--y-col", "y"])
        assert code == 3


class TestOptimize:
    def run_single(self, csv_file, out, extra=()):
        return main(
            [
                "optimize",
                "--data", str(csv_file),
                "--sr", "0.2:0.2:0.05",
                "--ps", "20",
                "--op", "0.1",
                "--samplers", "random",
                "--top", "3",
                "--seed", "5",
                "--out", str(out),
                *extra,
            ]
        )

    def test_single_combination(self, csv_file, tmp_path, capsys):
        out = tmp_path / "r.json"
        assert self.run_single(csv_file, out) == 0
        doc = json.loads(out.read_text())
        assert len(doc) == 1
        assert doc[0]["params"]["sampler"] == "random"
        table = capsys.readouterr().out
        assert "saliency" in table and f"{doc[0]['score']['value']:.6f}" in table

    def test_same_seed_same_file(self, csv_file, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        self.run_single(csv_file, a)
        self.run_single(csv_file, b)
        strip = lambda p: [
            {k: v for k, v in d.items() if k != "timings"} for d in json.loads(p.read_text())
        ]
        assert strip(a) == strip(b)

    def test_top_k_descending(self, csv_file, tmp_path):
        out = tmp_path / "r.json"
        code = main(
            [
                "optimize",
                "--data", str(csv_file),
                "--sr", "0.1:0.9:0.2",
                "--ps", "20,80",
                "--op", "0.05,0.4",
                "--samplers", "random,z_order",
                "--top", "3",
                "--out", str(out),
            ]
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert len(doc) == 3
        scores = [d["score"]["value"] for d in doc]
        assert scores == sorted(scores, reverse=True)

    def test_bad_sampler_is_usage_error(self, csv_file):
        code = main(["optimize", "--data", str(csv_file), "--samplers", "wat"])
        assert code == 2


class TestRender:
    def test_writes_png(self, csv_file, tmp_path):
        out = tmp_path / "p.png"
        code = main(["render", "--data", str(csv_file), "--rate", "0.5", "--out", str(out)])
        assert code == 0
        assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


class TestBenches:
    def test_bench_sampling_single_row(self, tmp_path):
        out = tmp_path / "t.csv"
        code = main(
            ["bench-sampling", "--synthetic", "300", "--rates", "0.05:0.05:0.05",
             "--samplers", "random", "--repeats", "3", "--out", str(out)]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "kind,rate,median_ms,reps"
        assert len(lines) == 2

    def test_bench_scaling_monotone(self, tmp_path):
        out = tmp_path / "s.csv"
        code = main(["bench-scaling", "--sizes", "1000,20000", "--repeats", "1", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "n,render_topo_ms"
        times = [float(line.split(",")[1]) for line in lines[1:]]
        assert times == sorted(times)

    def test_quality_single_sampler(self, tmp_path):
        out = tmp_path / "q.csv"
        code = main(
            ["quality", "--synthetic", "300", "--rates", "0.1:0.1:0.05",
             "--samplers", "random", "--repeats", "1", "--out", str(out)]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "sampler,rate,win_fraction,median_ms"
        assert all(line.split(",")[2] == "1.0000" for line in lines[1:])


def test_usage_exit_on_unknown_command():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
