"""W(E7) 共轭类表服务 - 构建、与参考行对齐、缓存、元素分类"""
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from threading import Lock
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import ValidationError

from src.config.settings import Config
from src.core.exceptions import (
    FingerprintCollisionError,
    InternalConsistencyError,
    NotAnIsometryError,
)
from src.core.reference_data import (
    CARTER_ROWS,
    ROWS_BY_ID,
    TIE_PAIR_OF,
    TIE_PAIRS,
    TIE_PARTNER_PAIRS,
    cyclotomic_signature,
    eigen_pairs,
)
from src.core.weyl import (
    CLASS_COUNT,
    GROUP_ORDER,
    ClassFingerprint,
    GroupStore,
    Isometry,
    cyclic_subgroup_classes,
    decode,
    eigenvalues_from_cyclotomic,
    element_order,
    encode,
    enumerate_group,
    fingerprint,
    geiser_element,
    has_contractible_orbit,
    label_conjugacy_classes,
    perp_signature,
)
from src.models.schemas import ClassRow, ClassTableFile, Minimality
from src.utils.monitoring import get_monitor

logger = logging.getLogger(__name__)

FORMAT_VERSION = 2
TABLE_FILE = f"class_table_v{FORMAT_VERSION}.json"
STORE_FILE = f"group_store_v{FORMAT_VERSION}.npz"

CSV_COLUMNS = [
    "id", "carter_label", "order", "eigenvalues", "rho", "geiser",
    "minimality", "class_size", "representative",
]


@dataclass(frozen=True)
class ConjugacyClassRecord:
    """一个共轭类的完整记录"""
    id: int
    carter_label: str
    order: int
    eigenvalues: Tuple[Tuple[int, int], ...]
    rho_invariant: int
    geiser_partner: int
    minimality: Minimality
    class_size: int
    representative: Isometry
    fingerprint: ClassFingerprint

    @property
    def centralizer_order(self) -> int:
        return GROUP_ORDER // self.class_size

    @property
    def eigen_tokens(self) -> List[str]:
        return [f"{n}^{k}" for n, k in self.eigenvalues]

    def to_row(self) -> ClassRow:
        return ClassRow(
            id=self.id,
            carter_label=self.carter_label,
            order=self.order,
            eigenvalues=self.eigen_tokens,
            rho=self.rho_invariant,
            geiser=self.geiser_partner,
            minimality=self.minimality,
            class_size=self.class_size,
            centralizer_order=self.centralizer_order,
            fingerprint=self.fingerprint.key(),
            representative=self.representative.to_json(),
        )

    @classmethod
    def from_row(cls, row: ClassRow) -> "ConjugacyClassRecord":
        eigen = tuple(tuple(int(x) for x in tok.split("^")) for tok in row.eigenvalues)
        return cls(
            id=row.id,
            carter_label=row.carter_label,
            order=row.order,
            eigenvalues=eigen,
            rho_invariant=row.rho,
            geiser_partner=row.geiser,
            minimality=row.minimality,
            class_size=row.class_size,
            representative=Isometry(row.representative),
            fingerprint=parse_fingerprint_key(row.fingerprint),
        )


def parse_fingerprint_key(key: str) -> ClassFingerprint:
    cyc, exc, root = key.split("|")
    return ClassFingerprint(
        charpoly_cyclotomic=tuple(tuple(int(x) for x in part.split("^")) for part in cyc.split(".")),
        exc_cycle_type=tuple(int(x) for x in exc.split(",")),
        root_cycle_type=tuple(int(x) for x in root.split(",")),
    )


class FingerprintIndex:
    """指纹 → 类编号；若有碰撞则记录碰撞组"""

    def __init__(self, records: Sequence[ConjugacyClassRecord]):
        self._by_key: Dict[str, List[int]] = {}
        for rec in records:
            self._by_key.setdefault(rec.fingerprint.key(), []).append(rec.id)
        self.collisions = [sorted(ids) for ids in self._by_key.values() if len(ids) > 1]

    def lookup(self, fp: ClassFingerprint) -> int:
        ids = self._by_key.get(fp.key())
        if not ids:
            raise InternalConsistencyError(f"指纹 {fp.key()} 不属于任何已知共轭类")
        if len(ids) > 1:
            raise FingerprintCollisionError(f"指纹 {fp.key()} 对应多个类 {ids}", tuple(ids))
        return ids[0]


@dataclass
class _ComputedClass:
    index: int
    rep_code: int
    size: int
    fingerprint: ClassFingerprint
    order: int
    signature: Tuple[Tuple[int, int], ...]
    geiser_index: int

    def tie_key(self):
        return (self.fingerprint.exc_cycle_type, self.fingerprint.root_cycle_type, self.size, self.rep_code)


def match_reference_rows(classes: Sequence[_ComputedClass]) -> Dict[int, int]:
    """把计算得到的类对齐到参考行，返回 计算下标 → 类编号

    特征值签名唯一的行直接对应；六个签名相同的行对中，tie_key 较小者
    （即 exc_cycle_type 字典序较小者）取较小编号。之后检查每一对的
    Geiser 像恰好落在参考表给出的伙伴对上。
    """
    by_sig: Dict[tuple, List[_ComputedClass]] = {}
    for c in classes:
        by_sig.setdefault(c.signature, []).append(c)
    rows_by_sig: Dict[tuple, List[int]] = {}
    for row in CARTER_ROWS:
        rows_by_sig.setdefault(cyclotomic_signature(row.eigen_tokens), []).append(row.class_id)

    if set(by_sig) != set(rows_by_sig):
        missing = set(rows_by_sig) ^ set(by_sig)
        raise InternalConsistencyError(f"计算得到的特征值签名与参考表不一致: {sorted(missing)}")

    assignment: Dict[int, int] = {}
    for sig, ids in rows_by_sig.items():
        computed = by_sig[sig]
        if len(computed) != len(ids):
            raise InternalConsistencyError(f"签名 {sig} 对应 {len(ids)} 行，但计算得到 {len(computed)} 个类")
        if len(ids) == 1:
            assignment[computed[0].index] = ids[0]
            continue
        pair = tuple(sorted(ids))
        if pair not in TIE_PAIRS:
            raise InternalConsistencyError(f"未预料的特征值重合行 {pair}")
        first, second = sorted(computed, key=_ComputedClass.tie_key)
        assignment[first.index] = pair[0]
        assignment[second.index] = pair[1]

    if sorted(assignment.values()) != list(range(1, CLASS_COUNT + 1)):
        raise InternalConsistencyError("参考行对齐不是双射")
    for c in classes:
        pair = TIE_PAIR_OF.get(assignment[c.index])
        if pair is not None and assignment[c.geiser_index] not in TIE_PARTNER_PAIRS[pair]:
            raise InternalConsistencyError(
                f"类 {assignment[c.index]} 的 Geiser 像 {assignment[c.geiser_index]} 不在行对 {TIE_PARTNER_PAIRS[pair]} 中"
            )
    return assignment


def _minimality(rep: Isometry, rho: int) -> Minimality:
    """格层面的极小性判据：存在两两正交的例外类轨道即非极小"""
    if has_contractible_orbit(rep):
        return Minimality.NON_MINIMAL
    if rho == 2:
        return Minimality.MINIMAL_CONIC_BUNDLE
    if rho == 1:
        return Minimality.MINIMAL_PICARD_ONE
    raise InternalConsistencyError(f"不变 Picard 秩为 {rho} 的类没有可收缩轨道，与极小曲面的 ρ ≤ 2 矛盾")


def _verify_against_reference(records: Dict[int, ConjugacyClassRecord]):
    for row in CARTER_ROWS:
        rec = records[row.class_id]
        problems = []
        if rec.order != row.order:
            problems.append(f"阶 {rec.order} ≠ {row.order}")
        if rec.eigenvalues != eigen_pairs(row.eigen_tokens):
            problems.append("特征值不符")
        if rec.rho_invariant != row.rho:
            problems.append(f"ρ {rec.rho_invariant} ≠ {row.rho}")
        if row.class_id in TIE_PAIR_OF:
            expected = TIE_PARTNER_PAIRS[TIE_PAIR_OF[row.class_id]]
            if rec.geiser_partner not in expected:
                problems.append(f"Geiser {rec.geiser_partner} 不在 {expected} 中")
        elif rec.geiser_partner != row.geiser:
            problems.append(f"Geiser {rec.geiser_partner} ≠ {row.geiser}")
        if problems:
            raise InternalConsistencyError(f"类 {row.class_id} 与参考行不一致: {'; '.join(problems)}")


class ClassTable:
    """60 个共轭类的记录表"""

    def __init__(
        self,
        records: Sequence[ConjugacyClassRecord],
        cyclic_count: int,
        store: Optional[GroupStore] = None,
        ids_by_position: Optional[np.ndarray] = None,
        store_path: Optional[Path] = None,
    ):
        self._records: Dict[int, ConjugacyClassRecord] = {r.id: r for r in records}
        if sorted(self._records) != list(range(1, CLASS_COUNT + 1)):
            raise InternalConsistencyError("类表必须恰好包含编号 1..60")
        self.cyclic_count = cyclic_count
        self.index = FingerprintIndex(records)
        self._store = store
        self._ids_by_position = ids_by_position
        self._store_path = store_path
        self._lock = Lock()
        if self.index.collisions:
            logger.warning(f"指纹碰撞 {self.index.collisions}，这些类将使用群存储精确分类")

    # ---------------------------------------------------------------- build
    @classmethod
    def build(cls, memory_budget: Optional[int] = None, show_progress: Optional[bool] = None) -> "ClassTable":
        """完整构建：枚举群、标记共轭类、对齐参考行、计算极小性"""
        monitor = get_monitor()
        with monitor.track_stage("enumerate_group"):
            store = enumerate_group(memory_budget, show_progress)
        with monitor.track_stage("label_classes"):
            partition = label_conjugacy_classes(store, show_progress)
        if len(partition.representatives) != CLASS_COUNT:
            raise InternalConsistencyError(f"共轭类个数为 {len(partition.representatives)}，应为 {CLASS_COUNT}")

        g = geiser_element()
        computed = []
        for idx, (code, size) in enumerate(zip(partition.representatives, partition.sizes)):
            rep = decode(code)
            fp = fingerprint(rep)
            pos = store.positions(np.array([encode(g @ rep)]))[0]
            computed.append(_ComputedClass(
                index=idx,
                rep_code=code,
                size=size,
                fingerprint=fp,
                order=element_order(rep),
                signature=perp_signature(fp.charpoly_cyclotomic),
                geiser_index=int(partition.labels[pos]),
            ))

        assignment = match_reference_rows(computed)
        records = {}
        for c in computed:
            class_id = assignment[c.index]
            rep = decode(c.rep_code)
            rho = 1 + dict(c.signature).get(1, 0)
            records[class_id] = ConjugacyClassRecord(
                id=class_id,
                carter_label=ROWS_BY_ID[class_id].carter_label,
                order=c.order,
                eigenvalues=eigenvalues_from_cyclotomic(c.signature),
                rho_invariant=rho,
                geiser_partner=assignment[c.geiser_index],
                minimality=_minimality(rep, rho),
                class_size=c.size,
                representative=rep,
                fingerprint=c.fingerprint,
            )
        _verify_against_reference(records)

        with monitor.track_stage("cyclic_subgroups"):
            cyclic_count = cyclic_subgroup_classes(partition, store)
        logger.info(f"共轭类 {CLASS_COUNT} 个，循环子群共轭类 {cyclic_count} 个")

        id_map = np.zeros(CLASS_COUNT, dtype=np.int8)
        for idx, class_id in assignment.items():
            id_map[idx] = class_id
        ids_by_position = id_map[partition.labels]
        return cls(list(records.values()), cyclic_count, store, ids_by_position)

    # ---------------------------------------------------------------- cache
    @classmethod
    def load_or_build(
        cls,
        cache_dir: Optional[str] = None,
        memory_budget: Optional[int] = None,
        rebuild: bool = False,
        show_progress: Optional[bool] = None,
    ) -> "ClassTable":
        """优先读取缓存；缓存缺失、损坏或版本不符时重新构建并写入缓存"""
        cache = Path(cache_dir or Config.CACHE_DIR)
        table_path = cache / TABLE_FILE
        if not rebuild and table_path.exists():
            try:
                table = cls.load(cache)
                logger.info(f"从缓存加载类表: {table_path}")
                return table
            except (OSError, ValueError, KeyError, ValidationError, InternalConsistencyError, NotAnIsometryError) as e:
                logger.warning(f"类表缓存损坏，重新构建: {e}")
        table = cls.build(memory_budget, show_progress)
        table.save(cache)
        return table

    @classmethod
    def load(cls, cache: Path) -> "ClassTable":
        with open(cache / TABLE_FILE, 'r', encoding='utf-8') as f:
            data = ClassTableFile.model_validate(json.load(f))
        if data.format_version != FORMAT_VERSION:
            raise ValueError(f"缓存格式版本 {data.format_version} 与当前版本 {FORMAT_VERSION} 不符")
        if data.group_order != GROUP_ORDER or data.class_count != CLASS_COUNT:
            raise ValueError("缓存中的群阶或类数不正确")
        records = [ConjugacyClassRecord.from_row(row) for row in data.records]
        store_path = cache / STORE_FILE
        return cls(records, data.cyclic_subgroup_classes, store_path=store_path if store_path.exists() else None)

    def save(self, cache: Path):
        cache.mkdir(parents=True, exist_ok=True)
        data = ClassTableFile(
            format_version=FORMAT_VERSION,
            group_order=GROUP_ORDER,
            class_count=CLASS_COUNT,
            cyclic_subgroup_classes=self.cyclic_count,
            fingerprint_collisions=self.index.collisions,
            records=[r.to_row() for r in self.records],
        )
        with open(cache / TABLE_FILE, 'w', encoding='utf-8') as f:
            json.dump(data.model_dump(mode="json"), f, ensure_ascii=False, indent=1)
        if self._store is not None and self._ids_by_position is not None:
            np.savez_compressed(
                cache / STORE_FILE,
                codes_bfs=self._store.codes_bfs,
                layer_sizes=np.array(self._store.layer_sizes, dtype=np.int64),
                ids_by_position=self._ids_by_position,
            )
            self._store_path = cache / STORE_FILE
        logger.info(f"类表已写入缓存: {cache}")

    def _ensure_store(self):
        with self._lock:
            if self._store is not None:
                return
            if self._store_path is not None and self._store_path.exists():
                with np.load(self._store_path) as data:
                    self._store = GroupStore(data["codes_bfs"], data["layer_sizes"].tolist())
                    self._ids_by_position = data["ids_by_position"]
                return
            logger.warning("群存储不在缓存中，重新构建以进行精确分类")
            rebuilt = ClassTable.build()
            self._store, self._ids_by_position = rebuilt._store, rebuilt._ids_by_position

    # ---------------------------------------------------------------- queries
    @property
    def records(self) -> List[ConjugacyClassRecord]:
        return [self._records[i] for i in range(1, CLASS_COUNT + 1)]

    def record(self, class_id: int) -> ConjugacyClassRecord:
        if class_id not in self._records:
            raise InternalConsistencyError(f"类编号必须在 1..60 之间: {class_id}")
        return self._records[class_id]

    @property
    def store(self) -> GroupStore:
        self._ensure_store()
        return self._store

    def classify_exact(self, m: Isometry) -> int:
        """通过群存储成员查询精确分类"""
        self._ensure_store()
        pos = self._store.positions(np.array([encode(m)]))[0]
        if pos < 0:
            raise NotAnIsometryError("矩阵不在 W(E7) 中")
        return int(self._ids_by_position[pos])

    def classify_element(self, m) -> int:
        """元素所在共轭类的编号：先查指纹，碰撞时回退到精确查询

        Raises:
            NotAnIsometryError: 输入不是保 K 等距
        """
        iso = m if isinstance(m, Isometry) else Isometry(m)
        iso.validate()
        fp = fingerprint(iso)
        try:
            return self.index.lookup(fp)
        except FingerprintCollisionError as e:
            logger.warning(f"{e}，回退到精确共轭查询")
            return self.classify_exact(iso)

    def geiser_twist_class(self, class_id: int) -> int:
        """Geiser 扭变：中心元乘以代表元后所在的类"""
        return self.classify_element(geiser_element() @ self.record(class_id).representative)

    def minimality_kind(self, class_id: int) -> Minimality:
        return self.record(class_id).minimality

    def minimal_ids(self) -> List[int]:
        return [r.id for r in self.records if r.minimality != Minimality.NON_MINIMAL]

    # ---------------------------------------------------------------- export
    def to_dataframe(self) -> pd.DataFrame:
        rows = []
        for rec in self.records:
            rows.append({
                "id": rec.id,
                "carter_label": rec.carter_label,
                "order": rec.order,
                "eigenvalues": " ".join(rec.eigen_tokens),
                "rho": rec.rho_invariant,
                "geiser": rec.geiser_partner,
                "minimality": rec.minimality.value,
                "class_size": rec.class_size,
                "representative": json.dumps(rec.representative.to_json(), separators=(",", ":")),
            })
        return pd.DataFrame(rows, columns=CSV_COLUMNS)

    def to_csv(self, path: Optional[str] = None) -> str:
        text = self.to_dataframe().to_csv(index=False, lineterminator="\n")
        if path:
            Path(path).write_text(text, encoding='utf-8')
        return text

    def to_json(self) -> dict:
        return {
            "group_order": GROUP_ORDER,
            "class_count": CLASS_COUNT,
            "cyclic_subgroup_classes": self.cyclic_count,
            "fingerprint_collisions": self.index.collisions,
            "records": [r.to_row().model_dump(mode="json") for r in self.records],
        }


# 全局类表实例
_table: Optional[ClassTable] = None
_table_lock = Lock()


def get_class_table(
    cache_dir: Optional[str] = None,
    memory_budget: Optional[int] = None,
    rebuild: bool = False,
) -> ClassTable:
    """获取（必要时构建）全局类表"""
    global _table
    with _table_lock:
        if _table is None or rebuild:
            _table = ClassTable.load_or_build(cache_dir, memory_budget, rebuild)
        return _table


def set_class_table(table: Optional[ClassTable]):
    """替换全局类表（测试与 CLI 使用）"""
    global _table
    with _table_lock:
        _table = table


def conjugacy_classes() -> List[ConjugacyClassRecord]:
    return get_class_table().records


def classify_element(m) -> int:
    return get_class_table().classify_element(m)


def geiser_twist_class(class_id: int) -> int:
    return get_class_table().geiser_twist_class(class_id)


def minimality_kind(class_id: int) -> Minimality:
    return get_class_table().minimality_kind(class_id)
