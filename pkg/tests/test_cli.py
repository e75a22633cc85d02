import json

import numpy as np
import pytest

from voidforge.config import ForgeConfig
from voidforge.dataset.cli import build_parser, main
from voidforge.dataset.export import ManifestRecord, read_manifest
from voidforge.dataset.formats import read_noise, read_png


@pytest.fixture(scope="module")
def generated(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli") / "data"
    code = main(["generate", "--seed", "5", "--count", "2", "--out", str(root), "--resolution", "32x32",
                 "--frames", "6", "--jobs", "1", "--no-progress"])
    assert code == 0
    return root


def _scene(root, index=0):
    record = ManifestRecord.from_dict(json.loads(read_manifest(root)[index]))
    return record, root / record.scene_id


def test_validate_generated(capsys, generated):
    assert main(["validate", "--dir", str(generated)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] is True
    assert report["violations"] == []


def test_validate_missing_manifest(capsys, tmp_path):
    assert main(["validate", "--dir", str(tmp_path)]) == 1
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] is False
    assert [v["check"] for v in report["violations"]] == ["MissingManifest"]


def test_stats(capsys, generated):
    assert main(["stats", "--dir", str(generated)]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["pair_count"] == 2
    assert set(stats["label_histogram"]) == {"BLACK", "DARK_GREY", "LIGHT_GREY", "WHITE"}


@pytest.mark.parametrize("argv", [
    [],
    ["generate", "--bogus"],
    ["generate", "--seed", "1", "--count", "1", "--out", "x", "--resolution", "32"],
    ["generate", "--seed", "1", "--count", "1", "--out", "x", "--template-mix", "1,2"],
    ["generate", "--seed", "1", "--count", "1", "--out", "x", "--holdout", "1.5"],
    ["generate", "--seed", "1", "--count", "1", "--out", "x", "--template-mix", "1.5,1,1"],
    ["generate", "--seed", "1", "--count", "1", "--out", "x", "--template-mix", "0.5,0.5,0.5"],
    ["generate", "--seed", "1", "--count", "1", "--out", "x", "--template-mix", "0,0,0"],
    ["generate", "--seed", "1", "--count", "1", "--out", "x", "--template-mix", "1,-1,1"],
    ["generate", "--seed", "1", "--count", "0", "--out", "x"],
    ["generate", "--seed", "1", "--count", "1", "--out", "x", "--grid", "0"],
    ["generate", "--seed", "1", "--count", "1", "--out", "x", "--frames", "-3"],
    ["generate", "--seed", "1", "--count", "1", "--out", "x", "--jobs", "0"],
    ["quadmask", "--frames-dir", "f", "--object-mask-dir", "m", "--out", "o", "--grid", "0"],
    ["quadmask", "--frames-dir", "f", "--object-mask-dir", "m", "--out", "o", "--timeout", "0"],
    ["warp-noise", "--flow-dir", "f", "--seed", "1", "--out", "o", "--k", "0"],
    ["warp-noise", "--flow-dir", "f", "--seed", "1", "--out", "o", "--channels", "zero"],
    ["inspect", "--dir", "d", "--scene", "0", "--out", "o", "--columns", "0"],
    ["explode"],
])
def test_usage_errors(argv):
    assert main(argv) == 2


def test_template_mix_is_parsed_as_integers():
    args = build_parser().parse_args(["generate", "--seed", "1", "--count", "1", "--out", "x", "--template-mix", "2,0,1"])
    assert args.template_mix == (2, 0, 1)
    assert all(type(w) is int for w in args.template_mix)


def test_warp_noise_matches_dataset(tmp_path, generated):
    record, scene = _scene(generated)
    out = tmp_path / "noise.vnse"
    code = main(["warp-noise", "--flow-dir", str(scene / "counterfactual"), "--seed", str(record.scene_seed),
                 "--out", str(out)])
    assert code == 0
    noise = read_noise(out)
    assert noise.shape == (6, 8, 8, 4)
    assert np.array_equal(noise, read_noise(scene / "noise.vnse"))


def test_warp_noise_without_flows(capsys, tmp_path):
    assert main(["warp-noise", "--flow-dir", str(tmp_path), "--seed", "1", "--out", str(tmp_path / "n.vnse")]) == 1
    assert "flow_*.vflo" in capsys.readouterr().err


def test_ground_truth_quadmask(tmp_path, generated):
    record, scene = _scene(generated, 1)
    out = tmp_path / "masks"
    code = main(["quadmask", "--frames-dir", str(scene / "factual"), "--object-mask-dir", str(scene),
                 "--out", str(out)])
    assert code == 0
    for t in range(record.frames):
        assert np.array_equal(read_png(out / f"quadmask_{t:04d}.png"), read_png(scene / f"quadmask_{t:04d}.png"))
        assert np.array_equal(read_png(out / f"trimask_{t:04d}.png"), read_png(scene / f"trimask_{t:04d}.png"))


def test_quadmask_unreachable_reasoner(tmp_path, generated):
    _, scene = _scene(generated)
    code = main(["quadmask", "--frames-dir", str(scene / "factual"), "--object-mask-dir", str(scene),
                 "--reasoner", "http://127.0.0.1:9/reason", "--timeout", "2", "--out", str(tmp_path / "masks")])
    assert code == 1


def test_inspect(tmp_path, generated):
    out = tmp_path / "sheet.png"
    assert main(["inspect", "--dir", str(generated), "--scene", "0", "--out", str(out), "--columns", "4"]) == 0
    assert out.is_file()
    assert main(["inspect", "--dir", str(generated), "--scene", "7", "--out", str(out)]) == 1


def test_jobs_from_environment(monkeypatch):
    monkeypatch.setenv("VOID_FORGE_JOBS", "3")
    assert ForgeConfig.from_env().jobs == 3
    assert ForgeConfig.from_env(jobs=2).jobs == 2
    monkeypatch.setenv("VOID_FORGE_JOBS", "many")
    assert ForgeConfig.from_env().jobs == 1
    monkeypatch.delenv("VOID_FORGE_JOBS")
    assert ForgeConfig.from_env().jobs == 1


@pytest.mark.slow
def test_parallel_generation_matches_serial(tmp_path, generated, monkeypatch):
    monkeypatch.setenv("VOID_FORGE_JOBS", "2")
    out = tmp_path / "parallel"
    assert main(["generate", "--seed", "5", "--count", "2", "--out", str(out), "--resolution", "32x32",
                 "--frames", "6", "--no-progress"]) == 0
    assert read_manifest(out) == read_manifest(generated)
