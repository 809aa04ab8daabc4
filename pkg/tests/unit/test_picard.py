"""Picard 格单元测试"""

import numpy as np
import pytest

from src.core.exceptions import MalformedClassError
from src.core.picard import (
    GRAM,
    K,
    DivisorClass,
    arithmetic_genus,
    exceptional_classes,
    geiser_image,
    geiser_matrix,
    gram_products,
    intersect,
    roots,
)


class TestDivisorClass:
    """DivisorClass 测试类"""

    def test_basis_intersections(self):
        """测试基底的相交数"""
        L = DivisorClass.line()
        E1 = DivisorClass.exceptional(1)
        assert intersect(L, L) == 1
        assert intersect(E1, E1) == -1
        assert intersect(L, E1) == 0

    def test_canonical_class(self):
        """测试 K² = 2（二次 del Pezzo 曲面）"""
        assert K.dot(K) == 2

    def test_wrong_length(self):
        """测试系数个数错误"""
        with pytest.raises(MalformedClassError):
            DivisorClass((1, 2, 3))

    def test_exceptional_index_range(self):
        """测试 E_i 下标越界"""
        with pytest.raises(MalformedClassError):
            DivisorClass.exceptional(8)

    def test_arithmetic(self):
        """测试加减与数乘"""
        L = DivisorClass.line()
        E1 = DivisorClass.exceptional(1)
        assert (L - E1).coeffs == (1, -1, 0, 0, 0, 0, 0, 0)
        assert (3 * L).coeffs[0] == 3
        assert (-E1).coeffs[1] == -1
        assert str(L - E1) == "(1; -1,0,0,0,0,0,0)"


class TestLatticeCensus:
    """例外类与根的枚举"""

    def test_exceptional_count(self):
        """测试 56 个例外类"""
        exc = exceptional_classes()
        assert len(exc) == 56
        assert all(e.dot(e) == -1 and e.dot(K) == -1 for e in exc)

    def test_root_count(self):
        """测试 126 个根"""
        rts = roots()
        assert len(rts) == 126
        assert all(r.dot(r) == -2 and r.dot(K) == 0 for r in rts)

    def test_lexicographic_order(self):
        """测试按系数字典序排列"""
        coeffs = [e.coeffs for e in exceptional_classes()]
        assert coeffs == sorted(coeffs)

    def test_known_classes_present(self):
        """测试常见例外类都在列表中"""
        exc = set(exceptional_classes())
        L = DivisorClass.line()
        E = [DivisorClass.exceptional(i) for i in range(1, 8)]
        assert E[0] in exc
        assert L - E[0] - E[1] in exc
        assert 2 * L - E[0] - E[1] - E[2] - E[3] - E[4] in exc
        assert -K - E[0] in exc

    def test_gram_products(self):
        """测试 E1..E7 两两正交"""
        E = [DivisorClass.exceptional(i) for i in range(1, 8)]
        assert np.array_equal(gram_products(E), -np.eye(7, dtype=np.int64))


class TestGenusAndGeiser:
    """伴随公式与 Geiser 对合"""

    def test_genus(self):
        """测试直线亏格 0、反典范类亏格 1"""
        assert arithmetic_genus(DivisorClass.line()) == 0
        assert arithmetic_genus(-K) == 1
        assert arithmetic_genus(DivisorClass.exceptional(3)) == 0

    def test_geiser_fixes_k(self):
        """测试 Geiser 对合固定 K"""
        assert geiser_image(K) == K

    def test_geiser_on_exceptional(self):
        """测试 E1 ↦ -K - E1"""
        image = geiser_image(DivisorClass.exceptional(1))
        assert image.coeffs == (3, -2, -1, -1, -1, -1, -1, -1)
        assert image in set(exceptional_classes())

    def test_geiser_matrix_is_involution(self):
        """测试 Geiser 矩阵平方为单位阵且保持相交形式"""
        g = geiser_matrix()
        assert np.array_equal(g @ g, np.eye(8, dtype=np.int64))
        assert np.array_equal(g.T @ GRAM @ g, GRAM)
