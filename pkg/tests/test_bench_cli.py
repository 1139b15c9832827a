import io
import json
import statistics
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CORPUS, random_image
from graphseg.agglomerate import SegParams
from graphseg.bench import (
    CSV_COLUMNS,
    TIME_COLUMNS,
    compare_partitions,
    configurations,
    rand_index,
    read_csv,
    render_svg,
    run_bench,
    write_csv,
)
from graphseg.cli import main
from graphseg.imaging import RasterImage, load_ppm, save_ppm
from oracles import brute_rand_index

HEADER = "image,width,height,strategy,n,workers,run,smooth_ms,build_ms,sort_ms,threshold_ms,minsize_ms,render_ms,total_ms"


@pytest.fixture
def uniform_ppm(tmp_path):
    path = tmp_path / "uniform.ppm"
    save_ppm(path, RasterImage(np.full((12, 16, 3), 200, np.uint8)))
    return path


@pytest.fixture
def small_photo():
    return next(p for p in CORPUS if "128x72" in p.name)


class TestSegment:
    def test_uniform_defaults(self, tmp_path, uniform_ppm):
        out, stats = tmp_path / "out.ppm", tmp_path / "stats.json"
        assert main(["segment", "--input", str(uniform_ppm), "--output", str(out), "--stats", str(stats)]) == 0
        img = load_ppm(out)
        assert len(np.unique(img.data.reshape(-1, 3), axis=0)) == 1
        data = json.loads(stats.read_text())
        assert data["component_count"] == 1
        assert set(data["timings_ms"]) == {"smooth", "build", "sort", "threshold", "minsize", "render", "total"}

    def test_hybrid_one_tile_byte_identical(self, tmp_path, small_photo):
        a, b = tmp_path / "a.ppm", tmp_path / "b.ppm"
        assert main(["segment", "--input", str(small_photo), "--output", str(a), "--seed", "5"]) == 0
        assert main(["segment", "--input", str(small_photo), "--output", str(b), "--seed", "5",
                     "--strategy", "hybrid", "--tiles", "1"]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_eight_tiles_on_small_photo(self, tmp_path, small_photo):
        out = tmp_path / "o.ppm"
        assert main(["segment", "--input", str(small_photo), "--output", str(out),
                     "--strategy", "hybrid", "--tiles", "8"]) == 0
        assert load_ppm(out).width == 128

    def test_too_many_tiles_exit_4(self, tmp_path, uniform_ppm, capsys):
        code = main(["segment", "--input", str(uniform_ppm), "--output", str(tmp_path / "o.ppm"),
                     "--strategy", "hybrid", "--tiles", "64"])
        assert code == 4
        assert "n too large" in capsys.readouterr().err

    def test_missing_input_exit_3(self, tmp_path):
        assert main(["segment", "--input", str(tmp_path / "none.ppm"), "--output", str(tmp_path / "o.ppm")]) == 3

    def test_corrupt_input_exit_3(self, tmp_path):
        bad = tmp_path / "bad.ppm"
        bad.write_bytes(b"P3\n1 1\n255\n0 0 0\n")
        assert main(["segment", "--input", str(bad), "--output", str(tmp_path / "o.ppm")]) == 3

    def test_bad_flag_exit_2(self, tmp_path, uniform_ppm):
        with pytest.raises(SystemExit) as info:
            main(["segment", "--input", str(uniform_ppm), "--output", "x.ppm", "--strategy", "gpu"])
        assert info.value.code == 2

    def test_bad_parameter_exit_2(self, tmp_path, uniform_ppm):
        assert main(["segment", "--input", str(uniform_ppm), "--output", str(tmp_path / "o.ppm"),
                     "--k", "-3"]) == 2

    def test_module_entry_point(self, tmp_path, uniform_ppm):
        out = tmp_path / "o.ppm"
        proc = subprocess.run([sys.executable, "-m", "graphseg", "segment", "--input", str(uniform_ppm),
                               "--output", str(out)], capture_output=True)
        assert proc.returncode == 0 and out.exists()


class TestBench:
    def test_configurations(self):
        assert configurations(["sequential", "pipelined", "hybrid"], [1, 4], 2) == [
            ("sequential", 1, 1), ("pipelined", 1, 2), ("hybrid", 1, 1), ("hybrid", 4, 2)]

    def test_single_run_csv(self, tmp_path, uniform_ppm):
        csv_path = tmp_path / "b.csv"
        assert main(["bench", "--input", str(uniform_ppm), "--strategies", "sequential",
                     "--runs", "1", "--warmup", "0", "--csv", str(csv_path)]) == 0
        lines = csv_path.read_text().splitlines()
        assert lines[0] == HEADER
        assert len(lines) == 3
        assert lines[2].split(",")[6] == "median"

    def test_csv_round_trip_and_medians(self, tmp_path, uniform_ppm, small_photo):
        csv_path, svg_path = tmp_path / "b.csv", tmp_path / "b.svg"
        assert main(["bench", "--input", str(uniform_ppm), "--input", str(small_photo),
                     "--strategies", "sequential,hybrid", "--tiles", "1,2", "--runs", "3",
                     "--warmup", "0", "--csv", str(csv_path), "--svg", str(svg_path)]) == 0
        with open(csv_path) as fh:
            runs, medians = read_csv(fh)
        assert len(runs) == 2 * 3 * 3 and len(medians) == 6
        for med in medians:
            group = [r for r in runs if (r["image"], r["strategy"], r["n"], r["workers"]) ==
                     (med["image"], med["strategy"], med["n"], med["workers"])]
            assert len(group) == 3
            for col in TIME_COLUMNS:
                assert med[col] == pytest.approx(statistics.median(r[col] for r in group), abs=1e-9)
        root = ET.parse(svg_path).getroot()
        assert root.tag.endswith("svg") and root.get("version") == "1.1"
        assert len(root.findall("{http://www.w3.org/2000/svg}rect")) == 6

    def test_run_bench_api(self, rng):
        report = run_bench([("r", random_image(rng, 16, 12))], ["pipelined"], [1], runs=2,
                           workers=2, params=SegParams(min_size=2), warmup=0)
        assert len(report.rows) == 2 and len(report.medians()) == 1
        buf = io.StringIO()
        write_csv(report, buf)
        buf.seek(0)
        runs, medians = read_csv(buf)
        assert [r["run"] for r in runs] == [0, 1]
        assert medians[0]["workers"] == 2
        assert "<svg" in render_svg(report)

    def test_read_csv_rejects_other_schema(self):
        with pytest.raises(ValueError):
            read_csv(io.StringIO("image,width\nx,1\n"))

    def test_header_constant(self):
        assert ",".join(CSV_COLUMNS) == HEADER

    def test_bad_runs_exit_2(self, tmp_path, uniform_ppm):
        assert main(["bench", "--input", str(uniform_ppm), "--runs", "0", "--csv", str(tmp_path / "b.csv")]) == 2


class TestCompare:
    def _write(self, path, px):
        save_ppm(path, RasterImage(np.asarray(px, np.uint8)))
        return str(path)

    def test_self_comparison(self, tmp_path, small_photo, capsys):
        out = tmp_path / "seg.ppm"
        main(["segment", "--input", str(small_photo), "--output", str(out)])
        capsys.readouterr()
        assert main(["compare", "--a", str(out), "--b", str(out)]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["identical"] is True and data["rand_index"] == 1.0

    def test_singletons_vs_one_component(self, tmp_path, capsys):
        a = self._write(tmp_path / "a.ppm", [[[1, 0, 0], [2, 0, 0]], [[3, 0, 0], [4, 0, 0]]])
        b = self._write(tmp_path / "b.ppm", np.full((2, 2, 3), 9))
        js = tmp_path / "c.json"
        assert main(["compare", "--a", a, "--b", b, "--json", str(js)]) == 0
        data = json.loads(js.read_text())
        assert data == {"identical": False, "component_counts": [4, 1], "rand_index": 0.0}

    def test_symmetric(self, tmp_path, rng):
        pa = rng.integers(0, 3, (6, 7, 3))
        pb = rng.integers(0, 2, (6, 7, 3))
        a, b = load_ppm(self._write(tmp_path / "a.ppm", pa)), load_ppm(self._write(tmp_path / "b.ppm", pb))
        ab, ba = compare_partitions(a, b), compare_partitions(b, a)
        assert ab.rand_index == ba.rand_index
        assert ab.component_counts == ba.component_counts[::-1]

    def test_relabeling_is_identical(self):
        a = RasterImage(np.array([[[1, 1, 1], [2, 2, 2], [1, 1, 1]]], np.uint8))
        b = RasterImage(np.array([[[7, 0, 0], [0, 7, 0], [7, 0, 0]]], np.uint8))
        cmp_ = compare_partitions(a, b)
        assert cmp_.identical and cmp_.rand_index == 1.0

    def test_dimension_mismatch(self, tmp_path):
        a = self._write(tmp_path / "a.ppm", np.zeros((2, 2, 3)))
        b = self._write(tmp_path / "b.ppm", np.zeros((2, 3, 3)))
        assert main(["compare", "--a", a, "--b", b]) != 0
        with pytest.raises(ValueError):
            compare_partitions(load_ppm(a), load_ppm(b))


class TestRandIndex:
    def test_trivial_sizes(self):
        assert rand_index([], []) == 1.0
        assert rand_index([3], [4]) == 1.0

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 40).flatmap(lambda n: st.tuples(
        st.lists(st.integers(0, 5), min_size=n, max_size=n),
        st.lists(st.integers(0, 5), min_size=n, max_size=n))))
    def test_matches_brute_force(self, pair):
        x, y = pair
        got = rand_index(x, y)
        assert got == pytest.approx(brute_rand_index(x, y), abs=1e-12)
        assert 0.0 <= got <= 1.0
        assert got == rand_index(y, x)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            rand_index([1, 2], [1])
