import csv
import os

import numpy as np
import pytest

from oblknn.cli import main
from oblknn.core import LabeledDataset
from oblknn.datasets import DatasetSpec, EmptyDataset, RaggedRows, UnparseableCell, load_csv
from oblknn.harness import (
    REFERENCE_ROSTER,
    ConfigError,
    parse_config,
    pipeline_from_section,
    pipeline_to_section,
    run_experiment,
)
from oblknn.opposition import OblScheme, compute_bounds, export_pairs, oppose
from oblknn.pipeline import PipelineConfig
from oblknn.preprocess import ImputePolicy

from conftest import random_dataset


def _write(path, text):
    path.write_text(text)
    return str(path)


class TestLoadCsv:
    def test_no_header(self, tmp_path):
        p = _write(tmp_path / "a.csv", "1,2,A\n3,4,B\n5,6,A\n")
        ds = load_csv(DatasetSpec("a", p, has_header=False))
        assert ds.X.tolist() == [[1, 2], [3, 4], [5, 6]]
        assert ds.y.tolist() == [0, 1, 0] and ds.class_names == ("A", "B")

    def test_header_and_named_label(self, tmp_path):
        p = _write(tmp_path / "b.csv", "cls,u,v\nx,1,2\ny,3,4\n")
        ds = load_csv(DatasetSpec("b", p, label_column="cls"))
        assert ds.feature_names == ("u", "v")
        assert ds.X.tolist() == [[1, 2], [3, 4]]

    def test_index_label_and_delimiter(self, tmp_path):
        p = _write(tmp_path / "c.csv", "7;1.5\n8;2.5\n")
        ds = load_csv(DatasetSpec("c", p, label_column=0, delimiter=";", has_header=False))
        assert ds.X.tolist() == [[1.5], [2.5]] and ds.class_names == ("7", "8")

    def test_missing_tokens(self, tmp_path):
        p = _write(tmp_path / "d.csv", "f,g,h,i,y\n,NA,?,nan,0\n1,2,3,4,1\n")
        ds = load_csv(DatasetSpec("d", p))
        assert np.isnan(ds.X[0]).all()

    def test_ragged(self, tmp_path):
        p = _write(tmp_path / "e.csv", "1,2,A\n3,B\n5,6,A\n")
        with pytest.raises(RaggedRows) as exc:
            load_csv(DatasetSpec("e", p, has_header=False))
        assert exc.value.line == 2

    def test_unparseable(self, tmp_path):
        p = _write(tmp_path / "f.csv", "a,b,y\n1,2,A\n3,oops,B\n")
        with pytest.raises(UnparseableCell) as exc:
            load_csv(DatasetSpec("f", p))
        assert (exc.value.line, exc.value.col) == (3, 2)  # both 1-based

    def test_empty_and_missing(self, tmp_path):
        with pytest.raises(EmptyDataset):
            load_csv(DatasetSpec("g", _write(tmp_path / "g.csv", "a,b\n")))
        with pytest.raises(FileNotFoundError):
            load_csv(DatasetSpec("h", str(tmp_path / "nope.csv")))

    def test_file_untouched(self, tmp_path):
        p = _write(tmp_path / "i.csv", "1,2,A\n3,4,B\n")
        before = open(p, "rb").read()
        load_csv(DatasetSpec("i", p, has_header=False))
        assert open(p, "rb").read() == before


class TestExportPairs:
    @pytest.mark.parametrize("kind", ["global", "classwise", "localized_classwise"])
    def test_shape_and_columns(self, kind, rng, tmp_path):
        ds = random_dataset(rng, n=15, d=3, n_classes=2)
        out = tmp_path / "pairs.csv"
        assert export_pairs(ds, OblScheme(kind, 2), out) == 30
        rows = list(csv.reader(open(out)))
        assert rows[0] == ["row_id", "kind", "class", "f0", "f1", "f2"]
        assert len(rows) == 31
        assert {r[1] for r in rows[1:]} == {"original", "opposite"}

    @pytest.mark.parametrize("kind", ["global", "classwise"])
    def test_reimport_round_trip(self, kind, rng, tmp_path):
        ds = random_dataset(rng, n=20, d=4, n_classes=3)
        out = tmp_path / "pairs.csv"
        export_pairs(ds, OblScheme(kind), out)
        rows = list(csv.reader(open(out)))[1:]
        orig = np.array([[float(v) for v in r[3:]] for r in rows if r[1] == "original"])
        opp = np.array([[float(v) for v in r[3:]] for r in rows if r[1] == "opposite"])
        assert np.array_equal(orig, ds.X)
        back = oppose(LabeledDataset(opp, ds.y), OblScheme(kind)).X
        assert np.max(np.abs(back - ds.X)) < 1e-12
        if kind == "global":
            b = compute_bounds(ds.X)
            assert np.allclose(orig + opp, b.lower + b.upper, atol=1e-12, rtol=0)


class TestConfig:
    def test_pipeline_section_round_trip(self):
        cfg = PipelineConfig(scaler_kind="robust", impute=ImputePolicy("feature_median"), n_select=4,
                             scheme=OblScheme("localized_classwise", 5), mode="replace",
                             renormalize_opposites=False, k=7, weighted=True, seed=11)
        assert pipeline_from_section(pipeline_to_section(cfg)) == cfg

    def test_parse(self, tmp_path):
        text = (
            "[experiment]\nfolds = 2\nruns = 1\nseed = 5\noutput_dir = out\n"
            "[dataset toy]\npath = toy.csv\nn_select = 2\n"
            "[algorithm KNN]\nk = 3\n"
            "[algorithm LOBL]\nscheme = localized_classwise\np = 4\nweighted = yes\n"
        )
        cfg = parse_config(text, base_dir=str(tmp_path), overrides={"runs": 3})
        assert (cfg.cv.n_folds, cfg.cv.n_runs, cfg.cv.seed) == (2, 3, 5)
        assert cfg.output_dir == str(tmp_path / "out")
        assert cfg.datasets[0].path == str(tmp_path / "toy.csv") and cfg.datasets[0].n_select == 2
        lobl = cfg.algorithms[1].pipeline_config(cfg.base, 2)
        assert lobl.scheme == OblScheme("localized_classwise", 4) and lobl.weighted and lobl.n_select == 2

    @pytest.mark.parametrize("text", [
        "[experiment]\nfolds = x\n[dataset a]\npath = a.csv\n[algorithm A]\n",
        "[dataset a]\npath = a.csv\n[algorithm A]\nscheme = spiral\n",
        "[dataset a]\npath = a.csv\n",
        "[dataset a]\npath = a.csv\n[algorithm A]\n[algorithm A]\n",
        "[mystery]\n",
    ])
    def test_bad_configs(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_inline_comments(self):
        cfg = parse_config("[experiment]\nruns = 4   ; short\n[dataset a]\npath = a.csv\n[algorithm A]\n")
        assert cfg.cv.n_runs == 4

    @pytest.mark.parametrize("raw,expect", [('";"', ";"), ("tab", "\t"), ("'|'", "|"), (",", ",")])
    def test_delimiter_values(self, raw, expect):
        cfg = parse_config(f"[dataset a]\npath = a.csv\ndelimiter = {raw}\n[algorithm A]\n")
        assert cfg.datasets[0].delimiter == expect

    def test_bare_semicolon_delimiter_rejected(self):
        with pytest.raises(ConfigError, match="quote"):
            parse_config("[dataset a]\npath = a.csv\ndelimiter = ;\n[algorithm A]\n")

    def test_roster(self):
        assert [a.id for a in REFERENCE_ROSTER] == ["KNN", "WKNN", "OBLKNN", "WOBLKNN"]


def _toy_setup(tmp_path, runs=1, algorithms=("KNN", "OBLKNN")):
    rng = np.random.default_rng(3)
    X = np.vstack([rng.normal(0, 1, (15, 3)), rng.normal(2, 1, (15, 3))])
    lines = ["a,b,c,y"] + [f"{r[0]:.6f},{r[1]:.6f},{r[2]:.6f},{'pq'[i >= 15]}" for i, r in enumerate(X)]
    (tmp_path / "toy.csv").write_text("\n".join(lines) + "\n")
    algo = {"KNN": "[algorithm KNN]\nk = 3\n",
            "OBLKNN": "[algorithm OBLKNN]\nk = 3\nscheme = global\n",
            "WLOBL": "[algorithm WLOBL]\nk = 3\nweighted = true\nscheme = localized_classwise\n"}
    text = f"[experiment]\nfolds = 2\nruns = {runs}\nseed = 1\noutput_dir = out\n[dataset toy]\npath = toy.csv\n"
    text += "".join(algo[a] for a in algorithms)
    return _write(tmp_path / "exp.ini", text)


class TestRunExperiment:
    def test_minimal_grid(self, tmp_path):
        cfg = parse_config(open(_toy_setup(tmp_path)).read(), base_dir=str(tmp_path))
        result = run_experiment(cfg)
        assert result.exit_code == 0
        out = tmp_path / "out"
        for metric in ("accuracy", "f1", "runtime"):
            rows = list(csv.reader(open(out / f"{metric}.csv")))
            assert rows[0] == ["dataset", "KNN", "OBLKNN"] and len(rows) == 2
        runtime = list(csv.reader(open(out / "runtime.csv")))[1][1:]
        assert all(float(v) >= 0 and len(v.split(".")[1]) == 4 for v in runtime)
        assert "DegenerateInput" in (out / "friedman.csv").read_text()
        assert (out / "manifest.txt").read_text().startswith("oblknn ")

    def test_byte_determinism(self, tmp_path):
        cfg_path = _toy_setup(tmp_path, runs=2, algorithms=("KNN", "OBLKNN", "WLOBL"))
        outputs = []
        for name in ("r1", "r2"):
            assert main(["run", cfg_path, "--output-dir", str(tmp_path / name)]) == 0
            outputs.append({m: (tmp_path / name / f"{m}.csv").read_bytes() for m in ("accuracy", "f1")})
        assert outputs[0] == outputs[1]

    def test_parallel_matches_serial(self, tmp_path):
        cfg_path = _toy_setup(tmp_path, algorithms=("KNN", "OBLKNN", "WLOBL"))
        assert main(["run", cfg_path, "--output-dir", str(tmp_path / "s")]) == 0
        assert main(["run", cfg_path, "--output-dir", str(tmp_path / "p"), "--jobs", "2"]) == 0
        for m in ("accuracy", "f1"):
            assert (tmp_path / "s" / f"{m}.csv").read_bytes() == (tmp_path / "p" / f"{m}.csv").read_bytes()

    def test_failed_cell_flagged(self, tmp_path):
        cfg_path = _toy_setup(tmp_path)
        text = open(cfg_path).read().replace("[algorithm KNN]\nk = 3", "[algorithm KNN]\nk = 500")
        _write(tmp_path / "exp.ini", text)
        assert main(["run", cfg_path]) == 1
        row = list(csv.reader(open(tmp_path / "out" / "accuracy.csv")))[1]
        assert row[1] == "FAILED" and row[2] != "FAILED"
        assert "KTooLarge" in (tmp_path / "out" / "manifest.txt").read_text()

    def test_config_errors_exit_2(self, tmp_path):
        assert main(["run", str(tmp_path / "missing.ini")]) == 2
        assert main(["run", _write(tmp_path / "bad.ini", "[algorithm A]\nk = zz\n")]) == 2


class TestCliVerbs:
    def test_oppose(self, tmp_path, capsys):
        p = _write(tmp_path / "d.csv", "a,b,y\n0,0,A\n1,2,A\n4,4,B\n")
        out = tmp_path / "pairs" / "d.csv"
        assert main(["oppose", p, "--scheme", "global", "--out", str(out)]) == 0
        rows = list(csv.reader(open(out)))
        assert len(rows) == 7
        assert rows[2] == ["0", "opposite", "A", "4.0", "4.0"]

    def test_oppose_missing_values_needs_zscore(self, tmp_path):
        p = _write(tmp_path / "d.csv", "a,y\n?,A\n1,A\n4,B\n")
        assert main(["oppose", p, "--out", str(tmp_path / "o.csv")]) == 2
        assert main(["oppose", p, "--zscore", "--out", str(tmp_path / "o.csv")]) == 0

    def test_validate(self, tmp_path, capsys):
        good = _write(tmp_path / "g.csv", "a,y\n1,A\n2,B\n")
        bad = _write(tmp_path / "b.csv", "a,y\nNA,A\n2,B\n")
        assert main(["validate", good]) == 0
        assert main(["validate", bad]) == 1
        assert "(0,0)" in capsys.readouterr().out
        assert main(["validate", str(tmp_path / "none.csv")]) == 2

    def test_unknown_verb(self):
        with pytest.raises(SystemExit):
            main(["explode"])


@pytest.mark.skipif(not os.path.exists(os.path.join(os.path.dirname(__file__), "..", "data", "zoo.csv")),
                    reason="bundled data missing")
def test_bundled_datasets_validate():
    data = os.path.join(os.path.dirname(__file__), "..", "data")
    shapes = {"zoo": (101, 16, 7), "ionosphere": (351, 34, 2), "sonar": (208, 60, 2), "breast_cancer": (569, 30, 2)}
    for name, shape in shapes.items():
        ds = load_csv(DatasetSpec(name, os.path.join(data, f"{name}.csv")))
        assert (ds.n_samples, ds.n_features, ds.n_classes) == shape
