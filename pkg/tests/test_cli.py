"""Tests for the command line interface."""

import json

import pytest
from click.testing import CliRunner

from dialogforge.cli import main


@pytest.fixture(scope="module")
def model_dir(tmp_path_factory):
    """A model directory produced by one real `train` invocation."""
    path = tmp_path_factory.mktemp("cli-models")
    result = CliRunner().invoke(main, ["--model", str(path), "train"])
    assert result.exit_code == 0, result.output
    return path


class TestTrain:
    def test_reports_what_was_trained(self, model_dir):
        # the fixture already ran `train`; retrain into the same place to
        # inspect the summary line
        result = CliRunner().invoke(main, ["--model", str(model_dir), "train"])
        assert result.exit_code == 0
        assert "trained intent (14 intents)" in result.output
        assert "entities (9 tags)" in result.output
        assert "recurrent policy (17 actions)" in result.output
        assert str(model_dir) in result.output

    def test_writes_the_five_model_files(self, model_dir):
        names = sorted(p.name for p in model_dir.iterdir())
        assert names == [
            "domain.json",
            "entity.model",
            "intent.model",
            "memo.model",
            "policy.model",
        ]


class TestEvaluateNlu:
    def test_prints_both_tables_and_writes_the_report(self, model_dir, tmp_path):
        report = tmp_path / "nlu.json"
        result = CliRunner().invoke(
            main,
            ["--model", str(model_dir), "evaluate-nlu", "--report", str(report)],
        )
        assert result.exit_code == 0, result.output
        assert "intent classification:" in result.output
        assert "entity extraction:" in result.output
        assert result.output.count("macro avg") == 2
        payload = json.loads(report.read_text(encoding="utf-8"))
        assert set(payload) == {"intent", "entities"}
        assert payload["intent"]["macro"]["f1"] == 1.0


class TestEvaluateCore:
    def test_reports_story_replay(self, model_dir, tmp_path):
        report = tmp_path / "core.json"
        result = CliRunner().invoke(
            main,
            ["--model", str(model_dir), "evaluate-core", "--report", str(report)],
        )
        assert result.exit_code == 0, result.output
        assert "144/144 story decisions reproduced; fully diagonal" in result.output
        assert "action_listen: 72/72" in result.output
        payload = json.loads(report.read_text(encoding="utf-8"))
        assert set(payload) == {"labels", "counts"}
        assert len(payload["counts"]) == len(payload["labels"]) == 17

    def test_missing_models_point_at_train(self, tmp_path):
        result = CliRunner().invoke(
            main, ["--model", str(tmp_path / "nowhere"), "evaluate-core"]
        )
        assert result.exit_code != 0
        assert "run 'dialogforge train' first" in result.output


class TestShell:
    def test_replies_until_quit(self, model_dir):
        result = CliRunner().invoke(
            main,
            ["--model", str(model_dir), "shell"],
            input="halo\n/quit\n",
        )
        assert result.exit_code == 0, result.output
        assert "bot> halo! ada yang bisa saya bantu?" in result.output

    def test_blank_lines_are_ignored_and_eof_leaves(self, model_dir):
        result = CliRunner().invoke(
            main,
            ["--model", str(model_dir), "shell"],
            input="\nmakasih ya\n",
        )
        assert result.exit_code == 0, result.output
        assert "bot> sama-sama, senang bisa membantu!" in result.output


class TestHelp:
    def test_lists_every_command(self):
        result = CliRunner().invoke(main, ["--help"])
        assert result.exit_code == 0
        for command in ("train", "evaluate-nlu", "evaluate-core", "shell", "serve"):
            assert command in result.output
