"""W(E7) 共轭类表单元测试"""

import json
from unittest.mock import patch

import pytest

from src.core.exceptions import InternalConsistencyError, NotAnIsometryError
from src.core.reference_data import (
    CARTER_ROWS,
    MINIMAL_IDS,
    ROWS_BY_ID,
    TIE_PAIR_OF,
    TIE_PAIRS,
    TIE_PARTNER_PAIRS,
    eigen_pairs,
)
from src.core.weyl import GROUP_ORDER, Isometry, geiser_element, simple_reflections
from src.models.schemas import Minimality
from src.services.class_table import TABLE_FILE, ClassTable


class TestClassTable:
    """ClassTable 测试类"""

    @pytest.fixture(autouse=True)
    def _table(self, class_table):
        self.table = class_table

    def test_sixty_classes(self):
        """测试恰有 60 个类，类大小之和为群阶"""
        records = self.table.records
        assert [r.id for r in records] == list(range(1, 61))
        assert sum(r.class_size for r in records) == GROUP_ORDER

    def test_rows_match_reference(self):
        """测试每一行的阶、特征值与 ρ 与参考表一致"""
        for row in CARTER_ROWS:
            rec = self.table.record(row.class_id)
            assert rec.order == row.order, row.class_id
            assert rec.rho_invariant == row.rho, row.class_id
            assert rec.eigenvalues == eigen_pairs(row.eigen_tokens), row.class_id

    def test_specific_rows(self):
        """测试第 39 行阶为 7，第 60 行的 Geiser 伙伴为 32"""
        assert self.table.record(39).order == 7
        assert {n for n, _ in self.table.record(39).eigenvalues} == {7}
        assert self.table.record(60).geiser_partner == 32
        assert self.table.record(1).class_size == 1

    def test_geiser_column(self):
        """测试 Geiser 列是对合；行对之外与参考表逐行一致，行对内落在伙伴对上"""
        for rec in self.table.records:
            if rec.id in TIE_PAIR_OF:
                assert rec.geiser_partner in TIE_PARTNER_PAIRS[TIE_PAIR_OF[rec.id]]
            else:
                assert rec.geiser_partner == ROWS_BY_ID[rec.id].geiser
            assert self.table.record(rec.geiser_partner).geiser_partner == rec.id

    @pytest.mark.parametrize("pair", TIE_PAIRS)
    def test_tie_pair_order(self, pair):
        """测试行对内 exc_cycle_type 字典序较小者取较小编号"""
        first, second = (self.table.record(i).fingerprint.exc_cycle_type for i in pair)
        assert first <= second

    @pytest.mark.parametrize("pair", TIE_PAIRS)
    def test_tie_pair_geiser_structure(self, pair):
        """测试行对的 Geiser 像恰好是伙伴对，且与记录中的 Geiser 列一致"""
        images = {self.table.geiser_twist_class(i) for i in pair}
        assert images == set(TIE_PARTNER_PAIRS[pair])
        for i in pair:
            assert self.table.geiser_twist_class(i) == self.table.record(i).geiser_partner

    def test_minimal_classes(self):
        """测试极小类集合：6 个 ρ=2，12 个 ρ=1"""
        minimal = self.table.minimal_ids()
        assert set(minimal) == set(MINIMAL_IDS)
        kinds = [self.table.minimality_kind(i) for i in minimal]
        assert kinds.count(Minimality.MINIMAL_CONIC_BUNDLE) == 6
        assert kinds.count(Minimality.MINIMAL_PICARD_ONE) == 12
        assert self.table.minimality_kind(1) == Minimality.NON_MINIMAL

    def test_cyclic_subgroup_count(self):
        """测试循环子群共轭类个数（W(E7) 的特征标全为有理数）"""
        assert self.table.cyclic_count == 60

    def test_classify_element(self):
        """测试元素分类"""
        assert self.table.classify_element(Isometry.identity()) == 1
        assert self.table.classify_element(simple_reflections()[0]) == 2
        assert self.table.classify_element(geiser_element()) == 49
        assert self.table.geiser_twist_class(1) == 49

    def test_classify_representatives(self):
        """测试每个代表元都被分到自己的类"""
        for rec in self.table.records:
            assert self.table.classify_element(rec.representative) == rec.id

    def test_classify_rejects_non_isometry(self):
        """测试非等距矩阵被拒绝"""
        with pytest.raises(NotAnIsometryError):
            self.table.classify_element([[2 if i == j else 0 for j in range(8)] for i in range(8)])

    def test_invalid_class_id(self):
        """测试非法类编号"""
        with pytest.raises(InternalConsistencyError):
            self.table.record(61)


class TestExport:
    """导出与缓存"""

    @pytest.fixture(autouse=True)
    def _table(self, class_table, class_table_cache):
        self.table = class_table
        self.cache = class_table_cache

    def test_csv(self):
        """测试 CSV 输出 60 行数据加表头"""
        lines = self.table.to_csv().strip().split("\n")
        assert len(lines) == 61
        assert lines[0].startswith("id,carter_label,order")

    def test_dataframe(self):
        """测试 DataFrame 的列"""
        df = self.table.to_dataframe()
        assert len(df) == 60
        assert list(df["id"]) == list(range(1, 61))

    def test_json_metadata(self):
        """测试 JSON 输出包含群阶与循环子群个数"""
        data = self.table.to_json()
        assert data["group_order"] == GROUP_ORDER
        assert data["cyclic_subgroup_classes"] == 60
        assert len(data["records"]) == 60

    def test_reload_from_cache(self):
        """测试从缓存重新加载得到相同的表"""
        loaded = ClassTable.load(self.cache)
        for a, b in zip(loaded.records, self.table.records):
            assert a.id == b.id
            assert a.representative == b.representative
            assert a.minimality == b.minimality

    def test_corrupted_cache_rebuilds(self, tmp_path):
        """测试缓存损坏时重新构建"""
        (tmp_path / TABLE_FILE).write_text("{not json", encoding="utf-8")
        with patch.object(ClassTable, "build", return_value=self.table) as build, \
                patch.object(ClassTable, "save") as save:
            table = ClassTable.load_or_build(str(tmp_path))
        assert table is self.table
        build.assert_called_once()
        save.assert_called_once()

    def test_version_mismatch_rebuilds(self, tmp_path):
        """测试缓存版本不符时重新构建"""
        data = json.loads((self.cache / TABLE_FILE).read_text(encoding="utf-8"))
        data["format_version"] = 999
        (tmp_path / TABLE_FILE).write_text(json.dumps(data), encoding="utf-8")
        with patch.object(ClassTable, "build", return_value=self.table) as build, \
                patch.object(ClassTable, "save"):
            ClassTable.load_or_build(str(tmp_path))
        build.assert_called_once()
