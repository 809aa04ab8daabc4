"""射影几何单元测试"""

import pytest

from src.core.exceptions import GeometryInputError, SizeCapError
from src.core.finite_field import FiniteField
from src.core.projective import (
    ClosedPoint,
    ProjPoint,
    closed_points_of_degree,
    coconic,
    collinear,
    count_closed_points,
    count_projective_points,
    is_general_position,
    iter_projective_points,
    kernel,
    parse_point,
    point_orbit,
    rank,
    transform_point,
)


def pts(ff, *coords):
    return [ProjPoint.of(ff, c) for c in coords]


class TestPoints:
    """射影点测试类"""

    def setup_method(self):
        """测试前初始化"""
        self.f3 = FiniteField.of(3, 1)
        self.f4 = FiniteField.of(2, 2)

    def test_normalize(self):
        """测试首个非零坐标归一化为 1"""
        assert ProjPoint.of(self.f3, (0, 2, 1)).coords == (0, 1, 2)

    def test_zero_point(self):
        """测试全零坐标"""
        with pytest.raises(GeometryInputError):
            ProjPoint.of(self.f3, (0, 0, 0))

    def test_enumeration(self):
        """测试 P^2(F_3) 有 13 个点，按字典序排列且不重复"""
        points = list(iter_projective_points(self.f3, 2))
        assert len(points) == 13 == count_projective_points(3, 2)
        assert points[0].coords == (0, 0, 1)
        assert len(set(points)) == 13
        assert points == sorted(points)

    def test_parse_point(self):
        """测试解析带括号与生成元的点"""
        pt = parse_point(self.f4, "(0:g:g:1)")
        assert pt.dim == 3
        assert pt.format(self.f4) == "(0:1:1:g+1)"
        with pytest.raises(GeometryInputError):
            parse_point(self.f4, "1")

    def test_orbit(self):
        """测试 F_4-点在 F_2 上的 Frobenius 轨道长度为 2"""
        g = self.f4.parse("g")
        orbit = point_orbit(self.f4, ProjPoint((1, g, 0)), 1)
        assert len(orbit) == 2
        assert ClosedPoint.from_point(self.f4, orbit[0], 2, 1).degree == 2

    def test_closed_point_validation(self):
        """测试闭点轨道长度必须等于次数"""
        with pytest.raises(GeometryInputError):
            ClosedPoint(q=2, degree=2, orbit=(ProjPoint((1, 0, 0)),))


class TestClosedPoints:
    """闭点枚举"""

    @pytest.mark.parametrize("q,d,expected", [(2, 1, 3), (2, 2, 1), (2, 3, 2), (3, 1, 4), (4, 2, 6)])
    def test_p1_counts(self, q, d, expected):
        """测试 P^1 上闭点个数：枚举与公式一致"""
        assert len(closed_points_of_degree(1, q, d)) == expected
        assert count_closed_points(1, q, d) == expected

    def test_p2_counts(self):
        """测试 P^2(F_2) 上 3 次闭点个数 (2^6+2^3+1 - 7)/3 = 22"""
        assert len(closed_points_of_degree(2, 2, 3)) == 22 == count_closed_points(2, 2, 3)

    def test_size_cap(self):
        """测试超出枚举上限"""
        with pytest.raises(SizeCapError):
            closed_points_of_degree(2, 5, 4, cap=1000)

    def test_invalid_dimension(self):
        """测试只支持 P^1 与 P^2"""
        with pytest.raises(GeometryInputError):
            closed_points_of_degree(3, 2, 1)


class TestLinearAlgebra:
    """有限域线性代数"""

    def setup_method(self):
        """测试前初始化"""
        self.ff = FiniteField.of(5, 1)

    def test_rank_and_kernel(self):
        """测试秩与零空间"""
        rows = [[1, 2, 3], [0, 1, 4]]
        assert rank(self.ff, rows) == 2
        ker = kernel(self.ff, rows, 3)
        assert len(ker) == 1
        for row in rows:
            assert sum(a * b for a, b in zip(row, ker[0])) % 5 == 0

    def test_collinear(self):
        """测试三点共线"""
        a, b, c = pts(self.ff, (1, 0, 0), (0, 1, 0), (1, 1, 0))
        assert collinear(self.ff, a, b, c)
        assert not collinear(self.ff, a, b, ProjPoint((0, 0, 1)))

    def test_coconic(self):
        """测试二次曲线 xz = y² 上的六点"""
        on_conic = [ProjPoint.of(self.ff, (t * t % 5, t, 1)) for t in range(5)] + [ProjPoint((1, 0, 0))]
        assert coconic(self.ff, on_conic)

    def test_transform(self):
        """测试射影变换"""
        swap = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
        assert transform_point(self.ff, swap, ProjPoint((1, 2, 3))).coords == (1, 3, 4)


class TestGeneralPosition:
    """一般位置判定"""

    def setup_method(self):
        """测试前初始化"""
        self.ff = FiniteField.of(5, 1)

    def test_frame(self):
        """测试标准标架处于一般位置"""
        frame = pts(self.ff, (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1))
        report = is_general_position(self.ff, frame)
        assert report
        assert report.summary() == "一般位置"

    def test_collinear_violation(self):
        """测试三点共线被报告"""
        points = pts(self.ff, (1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 0, 1))
        report = is_general_position(self.ff, points)
        assert not report
        assert report.collinear == [(0, 1, 2)]

    def test_coconic_violation(self):
        """测试六点共二次曲线被报告"""
        points = [ProjPoint.of(self.ff, (t * t % 5, t, 1)) for t in range(5)] + [ProjPoint((1, 0, 0))]
        report = is_general_position(self.ff, points)
        assert not report
        assert report.coconic == [(0, 1, 2, 3, 4, 5)]
        assert not report.collinear

    def test_input_errors(self):
        """测试重复点与点数超限"""
        a = ProjPoint((1, 0, 0))
        with pytest.raises(GeometryInputError):
            is_general_position(self.ff, [a, a])
        with pytest.raises(GeometryInputError):
            is_general_position(self.ff, list(iter_projective_points(self.ff, 2))[:9])
        with pytest.raises(GeometryInputError):
            is_general_position(self.ff, [ProjPoint((1, 0, 0, 0))])
