#!/usr/bin/env python3
"""
二次 del Pezzo 曲面计算工具 - 命令行入口

使用方式:
    python run_cli.py table --format csv
    python run_cli.py zeta --class 31 --q 5 --dmax 2
    python run_cli.py verdict --q 9
    python run_cli.py search --pattern 1x7 --q 9 --out witness.json
    python run_cli.py verify-cubic --file data/f2cubic.txt --p 2 --m 1
    python run_cli.py verify-curve --file data/node_quartic.txt --p 3 --m 1 --point 1:1:0

退出码: 0 = 找到/验证通过，2 = 搜索空间已穷尽，1 = 错误
"""
import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd

# 确保项目根目录在 Python 路径中
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.config.settings import Config
from src.core.config_search import Exhausted, SearchOptions, search_blowup_config
from src.core.exceptions import DelPezzoError
from src.core.finite_field import FieldSpec, FiniteField
from src.core.projective import parse_point
from src.core.surfaces import HyperSurface, curve_singularity_analysis, eckardt_analysis, surface_point_count
from src.core.zeta import frobenius_char_poly, point_counts
from src.models.schemas import ZetaReport
from src.services.class_table import get_class_table
from src.services.verdict import VerdictService
from src.utils.logger import setup_logging
from src.utils.monitoring import configure_monitor

logger = logging.getLogger("src.cli")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EXHAUSTED = 2


def _emit(text: str, out: Optional[str] = None):
    """写入文件或标准输出"""
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
        logger.info(f"已写入 {path}")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _dumps(data) -> str:
    return json.dumps(data, ensure_ascii=False, indent=2)


def _field(p: int, m: int) -> FiniteField:
    return FiniteField(FieldSpec.canonical(p, m))


def cmd_table(fmt: str = "csv", out: Optional[str] = None, rebuild: bool = False) -> int:
    """输出 60 行共轭类表"""
    table = get_class_table(Config.CACHE_DIR, Config.MEMORY_BUDGET, rebuild=rebuild)
    if fmt == "json":
        _emit(_dumps(table.to_json()), out)
    else:
        _emit(table.to_csv(), out)
    return EXIT_OK


def cmd_zeta(class_id: int, q: int, dmax: int) -> int:
    """输出类 class_id 在 F_q 上的 P(t) 与点数 N_1..N_dmax"""
    get_class_table(Config.CACHE_DIR, Config.MEMORY_BUDGET)
    counts = point_counts(class_id, q, dmax)
    report = ZetaReport(
        class_id=class_id,
        q=q,
        P=frobenius_char_poly(class_id, q),
        N=list(counts.counts),
        negative_at=counts.negative_at,
    )
    _emit(_dumps(report.model_dump(mode="json")))
    return EXIT_OK


def cmd_verdict(q: int, fmt: str = "csv", out: Optional[str] = None, run_searches: bool = True) -> int:
    """18 个极小类型在 F_q 上的存在性判定"""
    table = get_class_table(Config.CACHE_DIR, Config.MEMORY_BUDGET)
    service = VerdictService(table, threads=Config.THREADS, run_searches=run_searches)
    rows = service.verdict_table(q)
    if fmt == "json":
        _emit(_dumps([r.model_dump(mode="json") for r in rows]), out)
    else:
        df = pd.DataFrame([r.model_dump(mode="json") for r in rows])
        _emit(df.to_csv(index=False, lineterminator="\n"), out)
    return EXIT_OK


def cmd_search(pattern: str, q: int, out: Optional[str] = None,
               max_nodes: Optional[int] = None, frame_normalize: bool = True) -> int:
    """搜索一般位置配置；找到写出见证，穷尽写出穷尽报告"""
    options = SearchOptions(frame_normalize=frame_normalize, max_nodes=max_nodes, cap=Config.FIELD_SIZE_CAP)
    result = search_blowup_config(pattern, q, options)
    if isinstance(result, Exhausted):
        _emit(_dumps(result.to_report().model_dump(mode="json")), out)
        return EXIT_EXHAUSTED
    for line in result.describe():
        logger.info(line)
    _emit(_dumps(result.to_file().model_dump(mode="json")), out)
    return EXIT_OK


def cmd_verify_cubic(file: str, p: int, m: int, point: Optional[str] = None,
                     ext: int = 1, as_json: bool = False) -> int:
    """立方曲面的有理点数与各点的 Eckardt 判定"""
    ff = _field(p, m)
    surface = HyperSurface.load(file, ff)
    count, points = surface_point_count(surface)
    targets = [parse_point(ff, point)] if point else points

    parts: List[str] = [f"points: {count}"]
    reports = []
    for pt in targets:
        if point is None and not any(surface.gradient(pt.coords)):
            parts.append(f"{pt.format(ff)} singular")
            continue
        analysis = eckardt_analysis(surface, pt, ext)
        reports.append(analysis.to_report(ff).model_dump(mode="json"))
        parts.append(f"{pt.format(ff)} Eckardt: {'yes' if analysis.is_eckardt else 'no'}")
    if as_json:
        _emit(_dumps({"points": count, "analyses": reports}))
    else:
        _emit("; ".join(parts))
    return EXIT_OK


def cmd_verify_curve(file: str, p: int, m: int, point: str) -> int:
    """平面曲线在一点的重数、切锥与是否为结点"""
    ff = _field(p, m)
    curve = HyperSurface.load(file, ff)
    analysis = curve_singularity_analysis(curve, parse_point(ff, point))
    _emit(_dumps(analysis.to_report(ff).model_dump(mode="json")))
    return EXIT_OK


def _apply_overrides(args):
    """命令行参数覆盖环境配置"""
    if args.threads is not None:
        Config.THREADS = args.threads
    if args.memory_budget is not None:
        Config.MEMORY_BUDGET = args.memory_budget
    if args.cache_dir is not None:
        Config.CACHE_DIR = args.cache_dir
    Config.validate()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="二次 del Pezzo 曲面 - W(E7) 类表、zeta 函数与有限域构造",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
使用示例:
  # 输出类表（首次运行会构建并缓存 W(E7)）
  python run_cli.py table --format csv

  # 类 31 在 F_5 上的点数
  python run_cli.py zeta --class 31 --q 5 --dmax 2

  # F_9 上的存在性判定表
  python run_cli.py verdict --q 9

  # 在 P^2(F_9) 中搜索 7 个一般位置的有理点
  python run_cli.py search --pattern 1x7 --q 9

  # 验证 F_2 上的立方曲面
  python run_cli.py verify-cubic --file data/f2cubic.txt --p 2 --m 1
        """
    )
    parser.add_argument("--threads", type=int, default=None, help=f"线程数 (默认: {Config.THREADS})")
    parser.add_argument("--memory-budget", type=int, default=None, help="群枚举内存预算（字节）")
    parser.add_argument("--cache-dir", type=str, default=None, help=f"类表缓存目录 (默认: {Config.CACHE_DIR})")
    parser.add_argument("--verbose", action="store_true", help="输出 DEBUG 日志")

    subparsers = parser.add_subparsers(dest="command", help="可用命令")

    # table 命令
    table_parser = subparsers.add_parser("table", help="输出 60 行共轭类表")
    table_parser.add_argument("--format", choices=["csv", "json"], default="csv", help="输出格式")
    table_parser.add_argument("--out", type=str, default=None, help="输出文件（默认标准输出）")
    table_parser.add_argument("--rebuild", action="store_true", help="忽略缓存重新构建")

    # zeta 命令
    zeta_parser = subparsers.add_parser("zeta", help="zeta 函数与点数")
    zeta_parser.add_argument("--class", dest="class_id", type=int, required=True, help="类编号 1..60")
    zeta_parser.add_argument("--q", type=int, required=True, help="域的大小（素数幂）")
    zeta_parser.add_argument("--dmax", type=int, default=6, help="计算 N_1..N_dmax")

    # verdict 命令
    verdict_parser = subparsers.add_parser("verdict", help="极小类型的存在性判定表")
    verdict_parser.add_argument("--q", type=int, required=True, help="域的大小（素数幂）")
    verdict_parser.add_argument("--format", choices=["csv", "json"], default="csv", help="输出格式")
    verdict_parser.add_argument("--out", type=str, default=None, help="输出文件（默认标准输出）")
    verdict_parser.add_argument("--no-search", action="store_true", help="跳过配置搜索，只用定理与点数证书")

    # search 命令
    search_parser = subparsers.add_parser("search", help="搜索一般位置的闭点配置")
    search_parser.add_argument("--pattern", type=str, required=True, help="闭点次数模式，如 1x7、3,1x4、5,3c")
    search_parser.add_argument("--q", type=int, required=True, help="域的大小（素数幂）")
    search_parser.add_argument("--out", type=str, default=None, help="见证/穷尽报告输出文件")
    search_parser.add_argument("--max-nodes", type=int, default=None, help="搜索节点上限")
    search_parser.add_argument("--no-normalize", action="store_true", help="不做射影标架规范化")

    # verify-cubic 命令
    cubic_parser = subparsers.add_parser("verify-cubic", help="立方曲面的点数与 Eckardt 判定")
    cubic_parser.add_argument("--file", type=str, required=True, help="方程文件")
    cubic_parser.add_argument("--p", type=int, required=True, help="特征")
    cubic_parser.add_argument("--m", type=int, default=1, help="域 F_{p^m} 的次数")
    cubic_parser.add_argument("--point", type=str, default=None, help="只分析该点，如 0:0:0:1")
    cubic_parser.add_argument("--ext", type=int, default=1, help="在几次扩张中列出过该点的直线")
    cubic_parser.add_argument("--json", action="store_true", help="输出完整 JSON 报告")

    # verify-curve 命令
    curve_parser = subparsers.add_parser("verify-curve", help="平面曲线在一点的奇点分析")
    curve_parser.add_argument("--file", type=str, required=True, help="方程文件")
    curve_parser.add_argument("--p", type=int, required=True, help="特征")
    curve_parser.add_argument("--m", type=int, default=1, help="域 F_{p^m} 的次数")
    curve_parser.add_argument("--point", type=str, required=True, help="点，如 1:1:0")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """主函数，返回退出码"""
    parser = build_parser()
    args = parser.parse_args(argv)

    setup_logging(level="DEBUG" if args.verbose else None)
    if args.command is None:
        parser.print_help()
        return EXIT_OK

    try:
        _apply_overrides(args)
        configure_monitor(Config.METRICS_DIR)
        if args.command == "table":
            return cmd_table(args.format, args.out, args.rebuild)
        if args.command == "zeta":
            return cmd_zeta(args.class_id, args.q, args.dmax)
        if args.command == "verdict":
            return cmd_verdict(args.q, args.format, args.out, run_searches=not args.no_search)
        if args.command == "search":
            return cmd_search(args.pattern, args.q, args.out, args.max_nodes, not args.no_normalize)
        if args.command == "verify-cubic":
            return cmd_verify_cubic(args.file, args.p, args.m, args.point, args.ext, args.json)
        if args.command == "verify-curve":
            return cmd_verify_curve(args.file, args.p, args.m, args.point)
    except DelPezzoError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_ERROR
    except ValueError as e:
        logger.error(f"参数错误: {e}")
        return EXIT_ERROR
    parser.print_help()
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
