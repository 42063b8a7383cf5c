import numpy as np
import pandas as pd
import pytest

from recoloop.harness import (
    FM_SWEEP_DEFAULT_CELLS,
    RECORD_COLUMNS,
    SweepSpec,
    read_records,
    run_job,
    run_sweep,
    summarize,
    write_records,
)


def tiny_spec(**kw):
    defaults = dict(
        cells=((0.2, 0.8), (0.8, 0.2)),
        fm_values=(0.3,),
        replicates=1,
        recommenders=("ppr", "cf"),
        base_seed=5,
        n=40,
        density=0.03,
        steps=2,
    )
    defaults.update(kw)
    return SweepSpec(**defaults)


class TestSpec:
    def test_homophily_grid_builder(self):
        spec = SweepSpec.homophily_grid([0.0, 0.5, 1.0], n=40)
        assert len(spec.cells) == 9

    def test_job_count(self):
        spec = tiny_spec()
        assert len(spec.jobs()) == 2 * 1 * 1 * 2

    def test_from_config(self, tmp_path):
        cfg = tmp_path / "sweep.yaml"
        cfg.write_text(
            "homophily_values: [0.2, 0.8]\n"
            "fm_values: [0.3]\n"
            "replicates: 1\n"
            "recommenders: [ppr]\n"
            "n: 40\n"
            "steps: 1\n"
        )
        spec = SweepSpec.from_config(cfg)
        assert len(spec.cells) == 4
        assert spec.recommenders == ("ppr",)

    def test_from_config_rejects_unknown_keys(self, tmp_path):
        cfg = tmp_path / "sweep.yaml"
        cfg.write_text("nodes: 40\n")
        with pytest.raises(ValueError, match="unknown sweep config keys"):
            SweepSpec.from_config(cfg)

    def test_fm_default_cells_are_the_four_regimes(self):
        assert FM_SWEEP_DEFAULT_CELLS == [(0.2, 0.2), (0.2, 0.8), (0.8, 0.2), (0.8, 0.8)]


class TestRunSweep:
    def test_row_count_is_product_of_dimensions(self, tmp_path):
        spec = tiny_spec()
        path = run_sweep(spec, tmp_path / "out")
        df = read_records(path)
        # cells * fm * replicates * recommenders * (steps + baseline)
        assert len(df) == 2 * 1 * 1 * 2 * 3
        assert list(df.columns) == RECORD_COLUMNS
        assert set(df["step"]) == {0, 1, 2}

    def test_worker_count_does_not_change_output(self, tmp_path):
        spec = tiny_spec()
        p1 = run_sweep(spec, tmp_path / "w1", workers=1)
        p2 = run_sweep(spec, tmp_path / "w2", workers=2)
        assert open(p1).read() == open(p2).read()

    def test_single_job_rerun_reproduces_sweep_rows(self, tmp_path):
        spec = tiny_spec()
        df = read_records(run_sweep(spec, tmp_path / "out"))
        job = dict(h_mm=0.8, h_MM=0.2, fm=0.3, replicate=0, recommender="cf")
        rows = run_job(spec, job)
        subset = df[(df.recommender == "cf") & (df.h_mm == 0.8)].reset_index(drop=True)
        assert len(rows) == len(subset)
        for row, (_, ref) in zip(rows, subset.iterrows()):
            for col in ("step", "gini_in", "clustering", "visibility_m", "I_m", "I_M"):
                assert row[col] == pytest.approx(ref[col], abs=1e-12)

    def test_failed_cells_land_in_manifest(self, tmp_path):
        import json

        spec = tiny_spec(cells=((1.0, 1.0), (0.5, 0.5)), fm_values=(0.5,),
                         n=10, density=0.9, steps=1, recommenders=("ppr",))
        run_sweep(spec, tmp_path / "out")
        manifest = json.load(open(tmp_path / "out" / "manifest.json"))
        assert len(manifest["failed_cells"]) == 1
        assert manifest["failed_cells"][0]["h_mm"] == 1.0
        assert "capacity" in manifest["failed_cells"][0]["error"]

    def test_records_schema_check(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("h_mm,h_MM\n0.1,0.2\n")
        with pytest.raises(ValueError, match="schema"):
            read_records(bad)


class TestSummarize:
    def _fixture(self):
        rows = []
        for rep, (dv, gini_f, clus_f) in enumerate([(0.1, 0.5, 0.2), (0.3, 0.7, 0.4), (0.2, 0.6, 0.3)]):
            for step, last in ((0, False), (2, True)):
                rows.append({
                    "run_id": "x", "recommender": "ppr", "h_mm": 0.2, "h_MM": 0.2,
                    "f_m": 0.3, "replicate": rep, "seed": 1, "step": step,
                    "gini_in": gini_f if last else 0.4,
                    "clustering": clus_f if last else 0.1,
                    "visibility_m": 0.3 + (dv if last else 0.0),
                    "relative_visibility": 0.0,
                    "delta_visibility_so_far": dv if last else 0.0,
                    "I_m": 0.5, "I_M": 0.5,
                    "edges_added": 0, "edges_removed": 0, "skipped_nodes": 0,
                })
        return pd.DataFrame(rows)

    def test_hand_arithmetic(self):
        agg, gaps = summarize(self._fixture())
        assert gaps == []
        row = agg.iloc[0]
        assert row["delta_fm_mean"] == pytest.approx(0.2)
        assert row["delta_fm_std"] == pytest.approx(np.std([0.1, 0.3, 0.2], ddof=1))
        assert row["gini_change_mean"] == pytest.approx(np.mean([0.1, 0.3, 0.2]))
        assert row["clustering_change_mean"] == pytest.approx(0.2)

    def test_single_replicate_zero_std(self):
        df = self._fixture()
        agg, _ = summarize(df[df.replicate == 0])
        assert agg.iloc[0]["delta_fm_std"] == 0.0

    def test_gap_report(self):
        agg, gaps = summarize(self._fixture(), expected_cells=[
            ("ppr", 0.2, 0.2, 0.3),
            ("cf", 0.2, 0.2, 0.3),
        ])
        assert gaps == [{"recommender": "cf", "h_mm": 0.2, "h_MM": 0.2, "f_m": 0.3}]


def test_write_read_round_trip(tmp_path):
    df = TestSummarize()._fixture()
    path = tmp_path / "records.csv"
    write_records(df.to_dict("records"), path)
    back = read_records(path)
    assert len(back) == len(df)
    assert back["gini_in"].tolist() == pytest.approx(df["gini_in"].tolist())
