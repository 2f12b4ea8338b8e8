import json
import os

import numpy as np
import pytest
from click.testing import CliRunner

from fegan import imageio
from fegan.cli import EXIT_DIMENSION_MISMATCH, EXIT_MISSING_FILE, build_train_config, main, parse_config_file
from fegan.errors import ConfigurationError


@pytest.fixture()
def runner():
    return CliRunner()


class TestConfigFile:
    def test_parse_and_build(self, tmp_path):
        path = tmp_path / "train.cfg"
        path.write_text(
            "# toy settings\n"
            "image_size = [64, 48]\n"
            "num_classes = 8\n"
            "batch_size = 2\n"
            "max_steps = 3\n"
            'mask_params = {"num_strokes": 2, "brush_width_range": [4, 10]}\n'
        )
        values = parse_config_file(str(path))
        config = build_train_config(values, stage="parser", manifest="m.jsonl", out_dir="out")
        assert config.image_size == (64, 48)
        assert config.mask_params.num_strokes == 2
        assert config.mask_params.brush_width_range == (4, 10)

    def test_unknown_key_named_in_error(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("learning_rate_decay = 0.5\n")
        with pytest.raises(ConfigurationError) as excinfo:
            parse_config_file(str(path))
        assert "learning_rate_decay" in str(excinfo.value)

    def test_bare_string_values(self, tmp_path):
        path = tmp_path / "s.cfg"
        path.write_text("device = cpu\n")
        assert parse_config_file(str(path)) == {"device": "cpu"}


class TestHelp:
    @pytest.mark.parametrize(
        "args", [[], ["preprocess"], ["train-parser"], ["train-inpainter"], ["eval"], ["edit"], ["serve"]]
    )
    def test_help_exits_zero(self, runner, args):
        result = runner.invoke(main, args + ["--help"])
        assert result.exit_code == 0


class TestPreprocess:
    def test_synthetic_dataset(self, runner, tmp_path):
        out = tmp_path / "data"
        result = runner.invoke(
            main, ["preprocess", "--out", str(out), "--synthetic", "3", "--height", "48", "--width", "32"]
        )
        assert result.exit_code == 0, result.output
        entries = imageio.read_manifest(str(out / "manifest.jsonl"))
        assert len(entries) == 3
        image = imageio.load_image(entries[0].image_path)
        assert image.shape == (48, 32, 3)
        parsing = imageio.load_parsing(entries[0].parsing_path)
        assert parsing.shape == (48, 32)

    def test_directory_scan(self, runner, tmp_path, rng):
        image_dir, parsing_dir = tmp_path / "im", tmp_path / "ps"
        image_dir.mkdir(), parsing_dir.mkdir()
        for i in range(2):
            imageio.save_image(rng.uniform(-1, 1, (16, 16, 3)).astype(np.float32), str(image_dir / f"x{i}.png"))
            imageio.save_parsing(rng.integers(0, 5, (16, 16)), str(parsing_dir / f"x{i}.png"))
        result = runner.invoke(
            main, ["preprocess", "--out", str(tmp_path / "o"), "--images", str(image_dir), "--parsings", str(parsing_dir)]
        )
        assert result.exit_code == 0, result.output
        assert len(imageio.read_manifest(str(tmp_path / "o" / "manifest.jsonl"))) == 2


class TestTrainEval:
    def test_train_then_eval_produces_report(self, runner, tmp_path, tiny_checkpoints):
        report_path = tmp_path / "report.json"
        result = runner.invoke(
            main,
            [
                "eval",
                "--inpainter-checkpoint", tiny_checkpoints["inpainter"],
                "--manifest", tiny_checkpoints["manifest"],
                "--out", str(report_path),
            ],
        )
        assert result.exit_code == 0, result.output
        report = json.loads(report_path.read_text())
        assert report["num_images"] == 4
        assert "mean_psnr" in report and "per_image" in report

    def test_train_parser_cli(self, runner, tmp_path, tiny_checkpoints):
        cfg = tmp_path / "toy.cfg"
        cfg.write_text(
            "image_size = [64, 48]\nnum_classes = 8\nbatch_size = 2\nmax_steps = 1\n"
            "parser_depth = 3\nparser_base_channels = 8\ndisc_base_channels = 8\n"
            'mask_params = {"num_strokes": 2, "brush_width_range": [4, 10]}\n'
            'stroke_params = {"num_strokes": 2, "brush_width_range": [3, 8]}\n'
        )
        result = runner.invoke(
            main,
            [
                "train-parser", "--config", str(cfg),
                "--manifest", tiny_checkpoints["manifest"],
                "--out-dir", str(tmp_path / "run"),
            ],
        )
        assert result.exit_code == 0, result.output
        assert os.path.exists(tmp_path / "run" / "parser.ckpt")

    def test_bad_config_key_fails_with_name(self, runner, tmp_path, tiny_checkpoints):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("not_a_real_knob = 1\n")
        result = runner.invoke(
            main,
            ["train-parser", "--config", str(cfg), "--manifest", tiny_checkpoints["manifest"],
             "--out-dir", str(tmp_path / "run")],
        )
        assert result.exit_code != 0
        assert "not_a_real_knob" in result.output

    def test_train_inpainter_requires_parser_checkpoint(self, runner, tmp_path, tiny_checkpoints):
        result = runner.invoke(
            main,
            ["train-inpainter", "--manifest", tiny_checkpoints["manifest"],
             "--out-dir", str(tmp_path / "run"), "--max-steps", "1"],
        )
        assert result.exit_code != 0
        assert "parser_checkpoint" in result.output


class TestEditCommand:
    @pytest.fixture()
    def edit_env(self, tmp_path, tiny_checkpoints, rng):
        image = rng.uniform(-1, 1, (40, 30, 3)).astype(np.float32)
        image_path = tmp_path / "image.png"
        imageio.save_image(image, str(image_path))
        mask_path = tmp_path / "mask.png"
        imageio.save_mask(np.zeros((40, 30), dtype=np.float32), str(mask_path))
        return {
            "image": str(image_path),
            "mask": str(mask_path),
            "out": str(tmp_path / "out.png"),
            "args": ["--parser-checkpoint", tiny_checkpoints["parser"],
                     "--inpainter-checkpoint", tiny_checkpoints["inpainter"]],
            "tmp": tmp_path,
        }

    def test_zero_mask_output_matches_input(self, runner, edit_env):
        result = runner.invoke(
            main, ["edit", edit_env["image"], edit_env["mask"], "--out", edit_env["out"]] + edit_env["args"]
        )
        assert result.exit_code == 0, result.output
        original = imageio.load_image(edit_env["image"])
        edited = imageio.load_image(edit_env["out"])
        assert np.abs(edited - original).max() <= (1.0 / 255.0) * 2 + 1e-6

    def test_deterministic_output_bytes(self, runner, edit_env):
        out1, out2 = str(edit_env["tmp"] / "a.png"), str(edit_env["tmp"] / "b.png")
        for out in (out1, out2):
            result = runner.invoke(
                main,
                ["edit", edit_env["image"], edit_env["mask"], "--out", out, "--seed", "7"] + edit_env["args"],
            )
            assert result.exit_code == 0, result.output
        with open(out1, "rb") as f1, open(out2, "rb") as f2:
            assert f1.read() == f2.read()

    def test_missing_file_exits_2(self, runner, edit_env):
        result = runner.invoke(
            main, ["edit", "/nonexistent/image.png", edit_env["mask"], "--out", edit_env["out"]] + edit_env["args"]
        )
        assert result.exit_code == EXIT_MISSING_FILE

    def test_dimension_mismatch_exits_3(self, runner, edit_env, rng):
        bad_mask = str(edit_env["tmp"] / "bad_mask.png")
        imageio.save_mask(np.zeros((10, 10), dtype=np.float32), bad_mask)
        result = runner.invoke(
            main, ["edit", edit_env["image"], bad_mask, "--out", edit_env["out"]] + edit_env["args"]
        )
        assert result.exit_code == EXIT_DIMENSION_MISMATCH

    def test_parsing_output_written(self, runner, edit_env):
        parsing_out = str(edit_env["tmp"] / "parsing.png")
        result = runner.invoke(
            main,
            ["edit", edit_env["image"], edit_env["mask"], "--out", edit_env["out"],
             "--parsing-out", parsing_out] + edit_env["args"],
        )
        assert result.exit_code == 0, result.output
        assert os.path.exists(parsing_out)
