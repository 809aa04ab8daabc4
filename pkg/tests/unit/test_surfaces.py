"""显式方程的超曲面单元测试"""

from pathlib import Path

import pytest

from src.core.exceptions import GeometryInputError
from src.core.finite_field import FiniteField
from src.core.projective import ProjPoint, parse_point
from src.core.surfaces import (
    HyperSurface,
    binary_roots,
    cubic_discriminant,
    curve_singularity_analysis,
    eckardt_analysis,
    surface_point_count,
)

DATA_DIR = Path(__file__).resolve().parents[2] / "data"

NODAL_CUBIC = """
# y^2z - x^3 - x^2z
1,0,2,1
-1,3,0,0
-1,2,0,1
"""


class TestParsing:
    """方程文件解析"""

    def setup_method(self):
        """测试前初始化"""
        self.ff = FiniteField.of(5, 1)

    def test_parse(self):
        """测试解析与合并同类项"""
        curve = HyperSurface.parse("1,1,1,0\n2,1,1,0\n1,0,0,2", self.ff)
        assert curve.dim == 2
        assert curve.degree == 2
        assert dict(curve.terms) == {(1, 1, 0): 3, (0, 0, 2): 1}

    def test_str(self):
        """测试方程的文本形式"""
        assert str(HyperSurface.parse("1,2,0,0\n-1,0,1,1", self.ff)) == "x^2 + 4*y*z = 0"

    @pytest.mark.parametrize("text", [
        "1,2,0,0\n1,1,0,0",
        "# comment only\n",
        "1,1,1,1\n-1,1,1,1",
        "1,2,0",
        "1,2,0,0\n1,1,1,0,0",
        "1,-1,3,0",
        "h,1,1,0",
    ])
    def test_invalid(self, text):
        """测试非齐次、空文件、系数全零、列数错误、负指数与无法解析的系数"""
        with pytest.raises(GeometryInputError):
            HyperSurface.parse(text, self.ff)

    def test_load(self, tmp_path):
        """测试从文件读取"""
        path = tmp_path / "nodal.txt"
        path.write_text(NODAL_CUBIC, encoding="utf-8")
        curve = HyperSurface.load(path, self.ff)
        assert curve.degree == 3
        assert curve.contains(ProjPoint((0, 0, 1)))


class TestBinaryForms:
    """二元形式"""

    def test_discriminant(self):
        """测试三次判别式在有重根时为零"""
        f5 = FiniteField.of(5, 1)
        assert cubic_discriminant(f5, 1, 0, 4, 0) == 4
        assert cubic_discriminant(f5, 0, 1, 0, 0) == 0
        f2 = FiniteField.of(2, 1)
        assert cubic_discriminant(f2, 1, 0, 0, 1) == 1
        assert cubic_discriminant(f2, 1, 1, 0, 0) == 0

    def test_roots(self):
        """测试 P^1 上的零点"""
        f5 = FiniteField.of(5, 1)
        assert binary_roots(f5, [0, 1, 0]) == [(0, 1), (1, 0)]
        assert binary_roots(f5, [4, 0, 1]) == [(1, 1), (1, 4)]
        assert binary_roots(f5, [1, 0, 1]) == [(1, 2), (1, 3)]


class TestCubicSurfaces:
    """立方曲面上的 Eckardt 点"""

    def setup_method(self):
        """测试前初始化"""
        self.f2 = FiniteField.of(2, 1)
        self.f2_surface = HyperSurface.load(DATA_DIR / "f2cubic.txt", self.f2)
        self.f3 = FiniteField.of(3, 1)
        self.f3_surface = HyperSurface.load(DATA_DIR / "f3cubic.txt", self.f3)

    def test_f2_point_count(self):
        """测试 F_2 上的曲面恰有一个有理点"""
        count, points = surface_point_count(self.f2_surface)
        assert count == 1
        assert points == [ProjPoint((0, 0, 0, 1))]

    def test_f2_eckardt(self):
        """测试唯一的有理点是 Eckardt 点，三条直线定义在 F_8 上"""
        analysis = eckardt_analysis(self.f2_surface, ProjPoint((0, 0, 0, 1)))
        assert analysis.is_eckardt
        assert analysis.tangent_plane == [0, 0, 1, 0]
        assert analysis.quadric == [0, 0, 0]
        assert analysis.cubic == [1, 1, 0, 1]
        assert analysis.lines == []

        over_f64 = eckardt_analysis(self.f2_surface, ProjPoint((0, 0, 0, 1)), extension_degree=6)
        assert over_f64.is_eckardt
        assert len(over_f64.lines) == 3
        report = over_f64.to_report(self.f2)
        assert report.point == "(0:0:0:1)"
        assert len(report.lines_through_point) == 3

    def test_f4_point(self):
        """测试 F_4 上的点 (0:g:g:1)"""
        f4 = FiniteField.of(2, 2)
        surface = HyperSurface.load(DATA_DIR / "f2cubic.txt", f4)
        assert surface.contains(parse_point(f4, "0:g:g:1"))

    def test_f3_surface(self):
        """测试 F_3 上的曲面有 4 个有理点，(0:0:1:0) 不是 Eckardt 点"""
        count, points = surface_point_count(self.f3_surface)
        assert count == 4
        assert ProjPoint((0, 0, 1, 0)) in points
        assert not eckardt_analysis(self.f3_surface, ProjPoint((0, 0, 1, 0))).is_eckardt

    def test_invalid_inputs(self):
        """测试点不在曲面上或对象不是立方曲面"""
        with pytest.raises(GeometryInputError):
            eckardt_analysis(self.f2_surface, ProjPoint((1, 0, 0, 0)))
        curve = HyperSurface.parse(NODAL_CUBIC, self.f2)
        with pytest.raises(GeometryInputError):
            eckardt_analysis(curve, ProjPoint((0, 0, 1)))


class TestCurveSingularities:
    """平面曲线的奇点"""

    def test_node(self):
        """测试 y²z = x³ + x²z 在原点是结点"""
        f5 = FiniteField.of(5, 1)
        curve = HyperSurface.parse(NODAL_CUBIC, f5)
        analysis = curve_singularity_analysis(curve, ProjPoint((0, 0, 1)))
        assert analysis.multiplicity == 2
        assert analysis.is_node
        assert analysis.cone_factors == [(1, 1), (1, 4)]
        report = analysis.to_report(f5)
        assert report.is_singular and report.is_node

    def test_smooth_point(self):
        """测试光滑点的重数为 1"""
        f5 = FiniteField.of(5, 1)
        curve = HyperSurface.parse(NODAL_CUBIC, f5)
        # x = -1, y = 0, z = 1: 0 - (-1) - 1 = 0
        analysis = curve_singularity_analysis(curve, ProjPoint((4, 0, 1)))
        assert analysis.multiplicity == 1
        assert not analysis.is_singular and not analysis.is_node

    def test_tacnode_like_point(self):
        """测试四次曲线在 (1:1:0) 奇异但不是结点"""
        f3 = FiniteField.of(3, 1)
        curve = HyperSurface.load(DATA_DIR / "node_quartic.txt", f3)
        analysis = curve_singularity_analysis(curve, ProjPoint((1, 1, 0)))
        assert analysis.multiplicity == 2
        assert not analysis.is_node

    def test_point_not_on_curve(self):
        """测试点不在曲线上"""
        f5 = FiniteField.of(5, 1)
        curve = HyperSurface.parse(NODAL_CUBIC, f5)
        with pytest.raises(GeometryInputError):
            curve_singularity_analysis(curve, ProjPoint((1, 1, 1)))
