"""W(E7) 群引擎单元测试"""

import numpy as np
import pytest

from src.core.exceptions import BudgetExceededError, NotAnIsometryError
from src.core.picard import K, DivisorClass, exceptional_classes
from src.core.weyl import (
    GROUP_ORDER,
    Isometry,
    cyclotomic_factorization,
    decode,
    eigenvalues_from_cyclotomic,
    element_order,
    encode,
    enumerate_group,
    estimate_store_bytes,
    exceptional_orbits,
    fingerprint,
    geiser_element,
    has_contractible_orbit,
    invariant_picard_rank,
    perp_signature,
    simple_reflections,
    simple_roots,
)


class TestIsometry:
    """Isometry 测试类"""

    def setup_method(self):
        """测试前初始化"""
        self.reflections = simple_reflections()

    def test_simple_roots(self):
        """测试单纯根是与 K 正交的根"""
        for alpha in simple_roots():
            assert alpha.dot(alpha) == -2
            assert alpha.dot(K) == 0

    def test_reflections_are_involutions(self):
        """测试单纯反射的平方为恒等"""
        for r in self.reflections:
            assert r @ r == Isometry.identity()

    def test_reflection_swaps_exceptionals(self):
        """测试 s_{E1-E2} 交换 E1 与 E2"""
        r = self.reflections[0]
        assert r.apply(DivisorClass.exceptional(1)) == DivisorClass.exceptional(2)
        assert r.apply(K) == K

    def test_rejects_non_isometry(self):
        """测试不保持相交形式的矩阵被拒绝"""
        with pytest.raises(NotAnIsometryError):
            Isometry(2 * np.eye(8, dtype=np.int64))

    def test_rejects_wrong_shape(self):
        """测试形状错误"""
        with pytest.raises(NotAnIsometryError):
            Isometry(np.eye(7, dtype=np.int64))

    def test_rejects_moving_k(self):
        """测试不固定 K 的等距被拒绝：-I 保持相交形式但 K ↦ -K"""
        with pytest.raises(NotAnIsometryError):
            Isometry(-np.eye(8, dtype=np.int64))

    def test_power_and_order(self):
        """测试两个相邻反射之积的阶为 3"""
        x = self.reflections[0] @ self.reflections[1]
        assert element_order(x) == 3
        assert x.power(3) == Isometry.identity()

    def test_encode_decode(self):
        """测试编码可逆"""
        x = self.reflections[0] @ self.reflections[6] @ self.reflections[3]
        assert decode(encode(x)) == x


class TestInvariants:
    """共轭不变量"""

    def test_identity(self):
        """测试恒等元：ρ = 8，可收缩"""
        e = Isometry.identity()
        assert cyclotomic_factorization(e.matrix) == ((1, 8),)
        assert invariant_picard_rank(e) == 8
        assert has_contractible_orbit(e)
        assert fingerprint(e).exc_cycle_type == (1,) * 56

    def test_geiser(self):
        """测试 Geiser 中心元：K^⊥ 上为 -1，ρ = 1，极小"""
        g = geiser_element()
        cyc = cyclotomic_factorization(g.matrix)
        assert cyc == ((1, 1), (2, 7))
        assert element_order(g) == 2
        assert invariant_picard_rank(g) == 1
        assert not has_contractible_orbit(g)
        assert eigenvalues_from_cyclotomic(perp_signature(cyc)) == ((2, 1),) * 7

    def test_geiser_orbits(self):
        """测试 Geiser 把 56 个例外类配成 28 对"""
        orbits = exceptional_orbits(geiser_element())
        assert len(orbits) == 28
        assert all(len(o) == 2 and o[0] + o[1] == -K for o in orbits)

    def test_reflection_fingerprint(self):
        """测试反射的例外类轮换型：交换 12 对、固定 32 个"""
        fp = fingerprint(simple_reflections()[0])
        assert fp.exc_cycle_type == (2,) * 12 + (1,) * 32
        assert fp.charpoly_cyclotomic == ((1, 7), (2, 1))

    def test_exceptional_orbits_cover(self):
        """测试轨道划分覆盖全部例外类"""
        x = simple_reflections()[0] @ simple_reflections()[1]
        covered = [c for orbit in exceptional_orbits(x) for c in orbit]
        assert sorted(c.coeffs for c in covered) == sorted(e.coeffs for e in exceptional_classes())


class TestEnumeration:
    """群枚举"""

    def test_store_estimate_within_default_budget(self):
        """测试存储估计在 1 GiB 以内"""
        assert estimate_store_bytes() < 1 << 30

    def test_budget_exceeded(self):
        """测试预算不足时给出进度报告"""
        with pytest.raises(BudgetExceededError) as exc_info:
            enumerate_group(memory_budget=1 << 20, show_progress=False)
        assert "estimated_bytes" in exc_info.value.progress

    def test_full_group(self, class_table):
        """测试 BFS 闭包恰为 2,903,040 个元素"""
        store = class_table.store
        assert len(store) == GROUP_ORDER
        assert geiser_element() in store
        assert Isometry.identity() in store
        assert sum(store.layer_sizes) == GROUP_ORDER
