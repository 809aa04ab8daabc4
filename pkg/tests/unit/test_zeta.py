"""zeta 函数与点数单元测试"""

from math import comb

import pytest

from src.core.exceptions import InvalidFieldError
from src.core.weyl import Isometry, geiser_element, simple_reflections
from src.core.zeta import (
    char_poly_of,
    counts_from_zeta,
    counts_of,
    frobenius_char_poly,
    point_counts,
    prime_power,
    roots_on_circle,
    zeta_function,
    zeta_of,
)


def blowup_count(q: int, r: int) -> int:
    """P^2(F_q) 在 r 个有理点处爆破后的点数"""
    return q * q + q + 1 + r * q


class TestPrimePower:
    """prime_power 测试类"""

    def test_valid(self):
        """测试素数幂分解"""
        assert prime_power(2) == (2, 1)
        assert prime_power(9) == (3, 2)
        assert prime_power(8) == (2, 3)

    @pytest.mark.parametrize("q", [0, 1, 6, 12])
    def test_invalid(self, q):
        """测试非素数幂"""
        with pytest.raises(InvalidFieldError):
            prime_power(q)


class TestCounts:
    """点数公式"""

    def setup_method(self):
        """测试前初始化"""
        self.identity = Isometry.identity()
        self.geiser = geiser_element()
        self.reflection = simple_reflections()[0]

    @pytest.mark.parametrize("q", [2, 3, 4, 5])
    def test_split_surface(self, q):
        """测试分裂曲面的点数等于 7 点爆破的点数"""
        assert counts_of(self.identity, q, 1).counts[0] == q * q + 8 * q + 1
        assert counts_of(self.identity, q, 1).counts[0] == blowup_count(q, 7)

    def test_geiser_negative(self):
        """测试 Geiser 类在 F_2 上 N_1 = -7"""
        counts = counts_of(self.geiser, 2, 1)
        assert counts.counts == (-7,)
        assert counts.negative_at == 1

    def test_geiser_second_count(self):
        """测试 N_2 = 1 + 8q² + q⁴（Frobenius 平方为恒等）"""
        counts = counts_of(self.geiser, 3, 2)
        assert counts.counts[1] == 1 + 8 * 9 + 81
        assert counts.negative_at == 1

    def test_char_poly_identity(self):
        """测试 P(t) = (1 - qt)^8"""
        q = 3
        assert char_poly_of(self.identity, q) == [comb(8, j) * (-q) ** j for j in range(9)]

    def test_zeta_denominator(self):
        """测试 zeta 分母 (1-t)P(t)(1-q²t) 的次数为 10"""
        zeta = zeta_of(self.reflection, 5)
        assert zeta.numerator == (1,)
        assert len(zeta.denominator) == 11
        assert zeta.denominator[0] == 1

    @pytest.mark.parametrize("q", [2, 3, 5, 9])
    def test_trace_and_log_paths_agree(self, q):
        """测试迹公式与 log Z 展开给出相同的点数"""
        for m in (self.identity, self.geiser, self.reflection, self.reflection @ simple_reflections()[1]):
            assert counts_from_zeta(zeta_of(m, q), 6) == list(counts_of(m, q, 6).counts)

    def test_roots_on_circle(self):
        """测试 P(t) 的根模长为 1/q"""
        for m in (self.identity, self.geiser, self.reflection):
            assert roots_on_circle(char_poly_of(m, 4), 4)
        assert not roots_on_circle([1, 1, 0, 0, 0, 0, 0, 0, 0], 4)

    def test_invalid_dmax(self):
        """测试 dmax < 1"""
        with pytest.raises(ValueError):
            counts_of(self.identity, 2, 0)


class TestClassZeta:
    """按类编号的接口"""

    def test_conic_bundle_class_31(self, class_table):
        """测试类 31 在 F_5 上恰有 6 个点"""
        assert point_counts(31, 5, 2).counts[0] == 6

    def test_class_1(self, class_table):
        """测试类 1 在 F_3 上有 34 个点"""
        assert point_counts(1, 3, 1).counts[0] == 34

    def test_class_49(self, class_table):
        """测试类 49 在 F_2 上 N_1 为负"""
        counts = point_counts(49, 2, 1)
        assert counts.counts == (-7,)
        assert counts.negative_at == 1

    @pytest.mark.parametrize("q", [2, 3, 5, 9])
    def test_all_classes_consistent(self, class_table, q):
        """测试所有 60 个类的两条计算路径一致，且 P 的根都在圆上"""
        for class_id in range(1, 61):
            coeffs = frobenius_char_poly(class_id, q)
            assert coeffs[0] == 1
            assert roots_on_circle(coeffs, q)
            assert counts_from_zeta(zeta_function(class_id, q), 6) == list(point_counts(class_id, q, 6).counts)
