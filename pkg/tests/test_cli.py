"""Command-line behavior: exit codes, reports, batch aggregation, calibration."""

import json

import numpy as np
import pytest

from segsafe import save_label_map
from segsafe.cli import main
from helpers import labels


def write_pair(tmp_path, name, pred_rows, gt_rows, num_classes=2):
    pred = save_label_map(labels(pred_rows, num_classes=num_classes), tmp_path / f"{name}_pred.png")
    gt = save_label_map(labels(gt_rows, num_classes=num_classes), tmp_path / f"{name}_gt.png")
    return str(pred), str(gt)


def uniform(size, value=1):
    return np.full((size, size), value, dtype=int)


def cluster_5x5():
    """Eight flipped pixels inside the default critical region of a 5x5 map."""
    gt = uniform(5)
    pred = uniform(5)
    for i, j in ((1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3)):
        pred[i, j] = 2
    return pred, gt


class TestEval:
    def test_identical_masks_exit_zero_with_perfect_pcm(self, tmp_path, capsys):
        pred, gt = write_pair(tmp_path, "same", uniform(24), uniform(24))
        rc = main(["eval", pred, gt])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["pcm"] == 1.0
        assert doc["scan"]["verdict"] == "safe"

    def test_dense_cluster_exits_one_with_exact_density(self, tmp_path, capsys):
        pred, gt = write_pair(tmp_path, "cluster", *cluster_5x5())
        out_path = tmp_path / "report.json"
        rc = main(["eval", pred, gt, "--alpha", "0.2", "--k-safe", "5", "--out", str(out_path)])
        assert rc == 1
        doc = json.loads(out_path.read_text())
        assert doc["scan"]["verdict"] == "unsafe"
        assert doc["scan"]["offending_window"]["density_frac"] == "8/25"
        assert "unsafe" in capsys.readouterr().out

    def test_alpha_override_flips_the_verdict(self, tmp_path):
        pred, gt = write_pair(tmp_path, "cluster", *cluster_5x5())
        assert main(["eval", pred, gt, "--alpha", "0.2", "--k-safe", "5"]) == 1
        assert main(["eval", pred, gt, "--alpha", "0.4", "--k-safe", "5"]) == 0

    def test_missing_file_exits_two(self, tmp_path, capsys):
        gt = save_label_map(labels(uniform(5)), tmp_path / "gt.png")
        rc = main(["eval", str(tmp_path / "absent.png"), str(gt)])
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_k_safe_larger_than_image_exits_two(self, tmp_path, capsys):
        pred, gt = write_pair(tmp_path, "small", uniform(5), uniform(5))
        rc = main(["eval", pred, gt])  # default k_safe 20 cannot fit a 5x5 map
        assert rc == 2
        assert "k_safe" in capsys.readouterr().err

    def test_region_filter_flag(self, tmp_path):
        # dense block in the top-right corner, outside the default region
        gt = uniform(24)
        pred = uniform(24)
        pred[0:4, 20:24] = 2
        p, g = write_pair(tmp_path, "corner", pred, gt)
        base = ["--alpha", "0.5", "--k-safe", "4"]
        assert main(["eval", p, g, *base]) == 0
        assert main(["eval", p, g, *base, "--no-region-filter"]) == 1

    def test_edge_filter_flag(self, tmp_path):
        # boundary strip predicted as the class across the edge
        gt = uniform(24)
        gt[:, 12:] = 2
        pred = gt.copy()
        pred[8:21, 11] = 2
        p, g = write_pair(tmp_path, "edge", pred, gt)
        base = ["--alpha", "0.5", "--k-safe", "1"]
        assert main(["eval", p, g, *base]) == 0
        assert main(["eval", p, g, *base, "--no-edge-filter"]) == 1

    def test_profile_flag_adds_quantitative_block(self, tmp_path, capsys):
        pred, gt = write_pair(tmp_path, "cluster", *cluster_5x5())
        rc = main(["eval", pred, gt, "--alpha", "0.2", "--k-safe", "5", "--profile"])
        assert rc == 1
        doc = json.loads(capsys.readouterr().out)
        assert doc["quantitative"]["max_unsafe_k"] == 5
        assert "5" in doc["profile"]

    def test_viz_dir_writes_panels_and_figures(self, tmp_path, capsys):
        pred, gt = write_pair(tmp_path, "cluster", *cluster_5x5())
        viz = tmp_path / "viz"
        rc = main(
            ["eval", pred, gt, "--alpha", "0.2", "--k-safe", "5", "--profile",
             "--viz-dir", str(viz), "--out", str(tmp_path / "r.json")]
        )
        assert rc == 1
        names = {p.name for p in viz.iterdir()}
        assert {
            "2_ground_truth.png", "3_prediction.png", "4_errors_original.png",
            "5_errors_critical_region.png", "6_errors_edge_filtered.png",
            "7_errors_filtered.png", "8_unsafe_marker.png",
            "summary.png", "density_profile.png", "density_profile.csv",
        } <= names

    def test_config_file_is_honored(self, tmp_path):
        pred, gt = write_pair(tmp_path, "cluster", *cluster_5x5())
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"alpha": "0.2", "k_safe": 5}))
        assert main(["eval", pred, gt, "--config", str(config)]) == 1
        # explicit flag beats the file
        assert main(["eval", pred, gt, "--config", str(config), "--alpha", "0.4"]) == 0


class TestBatch:
    def make_manifest(self, tmp_path, pairs, extra_lines=()):
        lines = ["# pred gt"]
        lines += [f"{p} {g}" for p, g in pairs]
        lines += list(extra_lines)
        path = tmp_path / "manifest.txt"
        path.write_text("\n".join(lines) + "\n")
        return str(path)

    def safe_and_unsafe_pairs(self, tmp_path):
        safe1 = write_pair(tmp_path, "s1", uniform(24), uniform(24))
        pred = uniform(24)
        pred[10:14, 10:14] = 2  # inside the default region
        unsafe = write_pair(tmp_path, "u1", pred, uniform(24))
        safe2_pred = uniform(24)
        safe2_pred[12, 12] = 2
        safe2 = write_pair(tmp_path, "s2", safe2_pred, uniform(24))
        return safe1, unsafe, safe2

    def test_all_safe_manifest_exits_zero(self, tmp_path, capsys):
        safe1, _, safe2 = self.safe_and_unsafe_pairs(tmp_path)
        manifest = self.make_manifest(tmp_path, [safe1, safe2])
        rc = main(["batch", manifest, "--k-safe", "4"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["n_images"] == 2
        assert doc["n_unsafe"] == 0
        assert doc["mean_pcm"] == pytest.approx(
            (1.0 + (24 * 24 - 1) / (24 * 24)) / 2
        )

    def test_mixed_manifest_counts_match_per_image_exit_codes(self, tmp_path, capsys):
        pairs = list(self.safe_and_unsafe_pairs(tmp_path))
        per_image = [main(["eval", p, g, "--k-safe", "4"]) for p, g in pairs]
        capsys.readouterr()
        manifest = self.make_manifest(tmp_path, pairs)
        rc = main(["batch", manifest, "--k-safe", "4"])
        doc = json.loads(capsys.readouterr().out)
        assert doc["n_unsafe"] == sum(1 for code in per_image if code == 1) == 1
        assert rc == 1

    def test_jobs_do_not_change_the_aggregate(self, tmp_path):
        safe1, unsafe, safe2 = self.safe_and_unsafe_pairs(tmp_path)
        manifest = self.make_manifest(tmp_path, [safe1, unsafe, safe2, safe1])
        out1, out8 = tmp_path / "out1", tmp_path / "out8"
        assert main(["batch", manifest, "--k-safe", "4", "--jobs", "1", "--out-dir", str(out1)]) == 1
        assert main(["batch", manifest, "--k-safe", "4", "--jobs", "8", "--out-dir", str(out8)]) == 1
        assert (out1 / "aggregate.json").read_bytes() == (out8 / "aggregate.json").read_bytes()
        assert (out1 / "summary.csv").read_bytes() == (out8 / "summary.csv").read_bytes()

    def test_out_dir_contains_per_image_reports(self, tmp_path):
        safe1, unsafe, _ = self.safe_and_unsafe_pairs(tmp_path)
        manifest = self.make_manifest(tmp_path, [safe1, unsafe])
        out = tmp_path / "out"
        main(["batch", manifest, "--k-safe", "4", "--out-dir", str(out)])
        reports = sorted(p.name for p in out.glob("0*.json"))
        assert reports == ["0000_s1_pred.json", "0001_u1_pred.json"]

    def test_failures_are_recorded_without_strict(self, tmp_path, capsys):
        safe1, _, _ = self.safe_and_unsafe_pairs(tmp_path)
        manifest = self.make_manifest(
            tmp_path, [safe1], extra_lines=[f"{tmp_path}/gone.png {safe1[1]}"]
        )
        rc = main(["batch", manifest, "--k-safe", "4"])
        assert rc == 2  # nothing unsafe, but one image failed
        doc = json.loads(capsys.readouterr().out)
        assert doc["n_failed"] == 1
        assert doc["images"][1]["status"] == "failed"

    def test_strict_aborts_on_first_failure(self, tmp_path, capsys):
        safe1, _, _ = self.safe_and_unsafe_pairs(tmp_path)
        manifest = self.make_manifest(
            tmp_path, [safe1], extra_lines=[f"{tmp_path}/gone.png {safe1[1]}"]
        )
        rc = main(["batch", manifest, "--k-safe", "4", "--strict"])
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_malformed_manifest_line_exits_two(self, tmp_path, capsys):
        manifest = self.make_manifest(tmp_path, [], extra_lines=["only_one_token"])
        assert main(["batch", manifest]) == 2
        assert "expected 'pred gt'" in capsys.readouterr().err

    def test_empty_manifest_exits_two(self, tmp_path):
        manifest = self.make_manifest(tmp_path, [])
        assert main(["batch", manifest]) == 2


class TestCalibrate:
    BASE = [
        "calibrate", "--sensor-pixels", "1080", "--object-height", "10",
        "--reference-distance", "50",
    ]

    @staticmethod
    def parse(output):
        return dict(line.split("=", 1) for line in output.strip().splitlines())

    def test_extent_at_reference_distance(self, capsys):
        assert main([*self.BASE, "--distance", "50"]) == 0
        values = self.parse(capsys.readouterr().out)
        assert float(values["pixel_extent_m"]) == pytest.approx(10 / 1080, rel=1e-9)

    def test_extent_at_half_distance(self, capsys):
        assert main([*self.BASE, "--distance", "25"]) == 0
        values = self.parse(capsys.readouterr().out)
        assert float(values["pixel_extent_m"]) == pytest.approx(10 / 1080 / 2, rel=1e-9)

    def test_k_safe_suggestion_for_one_pixel_hazard(self, capsys):
        assert main([*self.BASE, "--distance", "50", "--hazard-size", str(10 / 1080)]) == 0
        values = self.parse(capsys.readouterr().out)
        assert values["k_safe"] == "1"

    def test_k_safe_for_half_meter_hazard(self, capsys):
        assert main([*self.BASE, "--distance", "50", "--hazard-size", "0.5"]) == 0
        values = self.parse(capsys.readouterr().out)
        # 0.5 m / 0.009259 m per pixel = 54.0 exactly
        assert values["k_safe"] == "54"

    def test_invalid_geometry_exits_two(self, capsys):
        assert main([*self.BASE, "--distance", "-50"]) == 2
        assert "error:" in capsys.readouterr().err
