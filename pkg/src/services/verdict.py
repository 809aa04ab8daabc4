"""极小二次 del Pezzo 曲面存在性判定表

每个 (类型, q) 先取定理数据，再尝试计算证书：
    - 点数证书：某个 N_d (d ≤ 6) 为负 ⇒ 不存在
    - 纤维证书：二次曲线丛类型所需的退化纤维闭点次数在 P^1(F_q) 上供给不足 ⇒ 不存在
    - Geiser 扭变配方：搜索到一般位置配置 ⇒ 存在；完整穷尽 ⇒ 不存在
计算证书与定理数据矛盾时抛出 VerdictConsistencyError；计算永远不会悄悄覆盖定理数据。
"""
import json
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from src.config.settings import Config
from src.core.config_search import Exhausted, SearchOptions, search_blowup_config
from src.core.conic_bundle import fibre_point_degrees, parse_wd6
from src.core.exceptions import (
    BudgetExceededError,
    InternalConsistencyError,
    InvalidFieldError,
    SizeCapError,
    VerdictConsistencyError,
)
from src.core.projective import count_closed_points
from src.core.reference_data import Verdict, conic_bundle_generators, theorem_verdict, twist_recipe
from src.core.zeta import counts_of, prime_power
from src.models.schemas import VerdictRow, VerdictSource
from src.services.class_table import ClassTable, get_class_table
from src.utils.monitoring import get_monitor

logger = logging.getLogger(__name__)

POINT_COUNT_DEPTH = 6

# 同一结论有多个证书时的优先级
_SOURCE_PRIORITY = {
    VerdictSource.COMPUTED_WITNESS: 0,
    VerdictSource.COMPUTED_EXHAUSTION: 1,
    VerdictSource.COMPUTED_POINT_COUNT: 2,
}


@dataclass
class Certificate:
    verdict: Verdict
    source: VerdictSource
    detail: str
    witness_path: Optional[str] = None


class VerdictService:
    """判定表生成服务"""

    def __init__(
        self,
        table: Optional[ClassTable] = None,
        witness_dir: Optional[str] = None,
        threads: Optional[int] = None,
        run_searches: bool = True,
        search_options: Optional[SearchOptions] = None,
    ):
        self.table = table or get_class_table()
        self.witness_dir = Path(witness_dir or Config.WITNESS_DIR)
        self.threads = threads or Config.THREADS
        self.run_searches = run_searches
        self.search_options = search_options or SearchOptions()

    # ---------------------------------------------------------------- 证书
    def point_count_certificate(self, class_id: int, q: int) -> Optional[Certificate]:
        rep = self.table.record(class_id).representative
        counts = counts_of(rep, q, POINT_COUNT_DEPTH)
        if counts.negative_at is None:
            return None
        d = counts.negative_at
        return Certificate(
            Verdict.NOT_EXISTS,
            VerdictSource.COMPUTED_POINT_COUNT,
            f"N_{d} = {counts.counts[d - 1]} < 0",
        )

    def fibre_certificate(self, class_id: int, q: int) -> Optional[Certificate]:
        generators = dict(conic_bundle_generators())
        if class_id not in generators:
            return None
        needed = Counter(fibre_point_degrees(parse_wd6(generators[class_id])))
        for d, k in sorted(needed.items()):
            supply = count_closed_points(1, q, d)
            if supply < k:
                return Certificate(
                    Verdict.NOT_EXISTS,
                    VerdictSource.COMPUTED_POINT_COUNT,
                    f"退化纤维需要 {k} 个 {d} 次点，P^1(F_{q}) 上只有 {supply} 个",
                )
        return None

    def search_certificate(self, class_id: int, q: int) -> Optional[Certificate]:
        recipe = twist_recipe(class_id)
        if recipe is None or not self.run_searches:
            return None
        twist = self.table.geiser_twist_class(class_id)
        if twist != recipe.twist_id:
            raise InternalConsistencyError(
                f"类型 {class_id} 的 Geiser 扭变是 {twist}，配方记录为 {recipe.twist_id}"
            )
        try:
            result = search_blowup_config(recipe.pattern, q, self.search_options)
        except (SizeCapError, BudgetExceededError) as e:
            logger.warning(f"类型 {class_id}, q={q}: 搜索 {recipe.pattern} 未完成，沿用定理数据: {e}")
            return None
        if isinstance(result, Exhausted):
            if not result.complete:
                logger.info(f"类型 {class_id}, q={q}: {recipe.pattern} 只搜索了部分空间，不构成证书")
                return None
            return Certificate(
                Verdict.NOT_EXISTS,
                VerdictSource.COMPUTED_EXHAUSTION,
                f"模式 {recipe.pattern} 穷尽（{result.nodes_visited} 个节点；{result.normalization}）",
            )
        path = self._write_witness(class_id, q, result.to_file().model_dump(mode="json"))
        return Certificate(
            Verdict.EXISTS,
            VerdictSource.COMPUTED_WITNESS,
            f"类型 {recipe.twist_id} 的配置 {recipe.pattern} 经 Geiser 扭变",
            witness_path=str(path),
        )

    def _write_witness(self, class_id: int, q: int, data: dict) -> Path:
        self.witness_dir.mkdir(parents=True, exist_ok=True)
        path = self.witness_dir / f"witness_type{class_id}_q{q}.json"
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(data, f, ensure_ascii=False, indent=2)
        return path

    # ---------------------------------------------------------------- 合并
    def verdict_row(self, class_id: int, q: int) -> VerdictRow:
        """单个 (类型, q) 的判定

        Raises:
            VerdictConsistencyError: 计算证书与定理数据矛盾
        """
        theorem, item = theorem_verdict(class_id, q)
        certificates = [
            c for c in (
                self.search_certificate(class_id, q),
                self.point_count_certificate(class_id, q),
                self.fibre_certificate(class_id, q),
            ) if c is not None
        ]
        for cert in certificates:
            if theorem != Verdict.OPEN and cert.verdict != theorem:
                raise VerdictConsistencyError(
                    f"类型 {class_id}, q={q}: 定理结论 {theorem.value}（条目 {item}），"
                    f"计算结论 {cert.verdict.value}（{cert.source.value}: {cert.detail}）"
                )
        if len({c.verdict for c in certificates}) > 1:
            raise VerdictConsistencyError(f"类型 {class_id}, q={q}: 计算证书之间互相矛盾")

        if not certificates:
            return VerdictRow(class_id=class_id, q=q, verdict=theorem.value, source=VerdictSource.THEOREM, item=item)
        best = min(certificates, key=lambda c: _SOURCE_PRIORITY[c.source])
        if theorem == Verdict.OPEN:
            logger.warning(f"类型 {class_id}, q={q}: 定理未给出结论，计算得到 {best.verdict.value}")
        else:
            logger.info(f"类型 {class_id}, q={q}: {best.source.value} 证实 {best.verdict.value}")
        return VerdictRow(
            class_id=class_id,
            q=q,
            verdict=best.verdict.value,
            source=best.source,
            item=item,
            detail=best.detail,
            witness_path=best.witness_path,
        )

    def verdict_table(self, q: int) -> List[VerdictRow]:
        """18 个极小类型在 F_q 上的判定，按类型编号排序

        Raises:
            InvalidFieldError: q 不是素数幂或超出支持范围
            VerdictConsistencyError: 任一计算证书与定理数据矛盾
        """
        prime_power(q)
        if q > Config.MAX_VERDICT_Q:
            raise InvalidFieldError(f"判定表只支持 q ≤ {Config.MAX_VERDICT_Q}: q = {q}")
        ids = self.table.minimal_ids()
        with get_monitor().track_stage("verdict"):
            if self.threads > 1:
                with ThreadPoolExecutor(max_workers=self.threads) as pool:
                    rows = list(pool.map(lambda cid: self.verdict_row(cid, q), ids))
            else:
                rows = [self.verdict_row(cid, q) for cid in ids]
        return sorted(rows, key=lambda r: r.class_id)


def verdict_table(q: int, **kwargs) -> List[VerdictRow]:
    return VerdictService(**kwargs).verdict_table(q)
