"""命令行入口单元测试"""

import json
from pathlib import Path

import pytest

from run_cli import EXIT_ERROR, EXIT_EXHAUSTED, EXIT_OK, build_parser, main
from src.config.settings import Config

DATA_DIR = Path(__file__).resolve().parents[2] / "data"


class TestParser:
    """参数解析"""

    def test_defaults(self):
        """测试默认参数"""
        args = build_parser().parse_args(["zeta", "--class", "31", "--q", "5"])
        assert args.class_id == 31
        assert args.dmax == 6

    def test_required_arguments(self):
        """测试缺少必填参数"""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["search", "--q", "9"])


class TestCommands:
    """各子命令"""

    @pytest.fixture(autouse=True)
    def _isolated(self, class_table, tmp_path, monkeypatch):
        self.tmp_path = tmp_path
        monkeypatch.setattr(Config, "METRICS_DIR", str(tmp_path / "logs"))
        monkeypatch.setattr(Config, "WITNESS_DIR", str(tmp_path / "witnesses"))
        monkeypatch.setattr(Config, "THREADS", 1)

    def test_no_command(self, capsys):
        """测试不带子命令时输出帮助"""
        assert main([]) == EXIT_OK
        assert "verify-cubic" in capsys.readouterr().out

    def test_zeta(self, capsys):
        """测试类 31 在 F_5 上有 6 个有理点"""
        assert main(["zeta", "--class", "31", "--q", "5", "--dmax", "2"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["N"][0] == 6
        assert len(report["P"]) == 9
        assert report["negative_at"] is None

    def test_table(self):
        """测试类表 CSV 有表头与 60 行"""
        out = self.tmp_path / "table.csv"
        assert main(["table", "--out", str(out)]) == EXIT_OK
        assert len(out.read_text(encoding="utf-8").splitlines()) == 61

    def test_verdict_json(self, capsys):
        """测试不做搜索的判定表"""
        assert main(["verdict", "--q", "5", "--format", "json", "--no-search"]) == EXIT_OK
        rows = json.loads(capsys.readouterr().out)
        assert len(rows) == 18
        assert {r["source"] for r in rows} <= {"Theorem", "ComputedPointCount"}

    def test_search_exhausted(self, capsys):
        """测试 F_4 上 7 个有理点的搜索空间穷尽，退出码为 2"""
        assert main(["search", "--pattern", "1x7", "--q", "4"]) == EXIT_EXHAUSTED
        report = json.loads(capsys.readouterr().out)
        assert report["exhausted"] and report["complete"]

    def test_search_witness(self):
        """测试 F_9 上找到配置并写出见证文件"""
        out = self.tmp_path / "witness.json"
        assert main(["search", "--pattern", "1x7", "--q", "9", "--out", str(out)]) == EXIT_OK
        data = json.loads(out.read_text(encoding="utf-8"))
        assert data["pattern"] == "1x7"
        assert len(data["points"]) == 7

    def test_verify_cubic(self, capsys):
        """测试 F_2 上立方曲面唯一的有理点是 Eckardt 点"""
        code = main(["verify-cubic", "--file", str(DATA_DIR / "f2cubic.txt"), "--p", "2", "--m", "1"])
        assert code == EXIT_OK
        assert capsys.readouterr().out.strip() == "points: 1; (0:0:0:1) Eckardt: yes"

    def test_verify_cubic_json(self, capsys):
        """测试 JSON 报告列出过该点的三条直线"""
        code = main([
            "verify-cubic", "--file", str(DATA_DIR / "f2cubic.txt"), "--p", "2",
            "--point", "0:0:0:1", "--ext", "6", "--json",
        ])
        assert code == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["points"] == 1
        assert len(report["analyses"][0]["lines_through_point"]) == 3

    def test_verify_curve(self, capsys):
        """测试四次曲线在 (1:1:0) 处奇异但不是结点"""
        code = main([
            "verify-curve", "--file", str(DATA_DIR / "node_quartic.txt"), "--p", "3", "--point", "1:1:0",
        ])
        assert code == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["is_singular"] and not report["is_node"]
        assert report["multiplicity"] == 2

    @pytest.mark.parametrize("argv", [
        ["search", "--pattern", "1x9", "--q", "2"],
        ["zeta", "--class", "61", "--q", "5"],
        ["zeta", "--class", "31", "--q", "6"],
        ["verify-curve", "--file", "missing-file.txt", "--p", "3", "--point", "1:1:0"],
        ["--threads", "0", "verdict", "--q", "5"],
    ])
    def test_errors(self, argv):
        """测试输入错误时退出码为 1"""
        assert main(argv) == EXIT_ERROR
