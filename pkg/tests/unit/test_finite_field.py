"""有限域算术单元测试"""

import pytest

from src.core.exceptions import InvalidFieldError, SizeCapError
from src.core.finite_field import (
    FieldEmbedding,
    FieldSpec,
    FiniteField,
    canonical_modulus,
    field_ops,
    working_field,
)


class TestFieldSpec:
    """FieldSpec 测试类"""

    def test_canonical_modulus(self):
        """测试规范模多项式取字典序最小的不可约多项式"""
        assert canonical_modulus(2, 2) == (1, 1, 1)
        assert canonical_modulus(2, 3) == (1, 0, 1, 1)
        assert canonical_modulus(3, 2) == (1, 0, 1)
        assert canonical_modulus(5, 1) == (1, 0)

    def test_reducible_modulus(self):
        """测试可约模多项式被拒绝"""
        with pytest.raises(InvalidFieldError):
            FieldSpec(2, 2, (1, 0, 1))

    def test_non_prime(self):
        """测试特征非素数"""
        with pytest.raises(InvalidFieldError):
            FieldSpec.canonical(4, 1)

    def test_size(self):
        """测试域的大小"""
        assert FieldSpec.canonical(3, 2).size == 9


class TestArithmetic:
    """域运算"""

    @pytest.mark.parametrize("p,m", [(2, 1), (5, 1), (2, 2), (3, 2), (2, 3), (2, 6)])
    def test_field_axioms(self, p, m):
        """测试乘法逆、分配律与 Frobenius 的周期"""
        ff = FiniteField.of(p, m)
        elems = list(ff.elements())
        assert len(elems) == p ** m
        for a in elems[1:]:
            assert ff.mul(a, ff.inv(a)) == 1
            assert ff.frobenius(a, m) == a
        a, b, c = elems[-1], elems[len(elems) // 2], elems[1]
        assert ff.mul(a, ff.add(b, c)) == ff.add(ff.mul(a, b), ff.mul(a, c))
        assert ff.sub(ff.add(a, b), b) == a

    def test_table_and_poly_backends_agree(self):
        """测试 exp/log 表与多项式运算结果一致"""
        spec = FieldSpec.canonical(3, 3)
        tables = FiniteField(spec)
        poly = FiniteField(spec, cap=2)
        assert tables._log is not None and poly._log is None
        for a in range(1, 27, 5):
            for b in range(1, 27, 7):
                assert tables.mul(a, b) == poly.mul(a, b)
            assert tables.inv(a) == poly.inv(a)
            assert tables.pow(a, 11) == poly.pow(a, 11)

    def test_inverse_of_zero(self):
        """测试 0 没有逆元"""
        with pytest.raises(ZeroDivisionError):
            FiniteField.of(3, 2).inv(0)

    def test_f4_structure(self):
        """测试 F_4 中 g² = g + 1"""
        ff = FiniteField.of(2, 2)
        g = ff.parse("g")
        assert ff.mul(g, g) == ff.parse("g+1")
        assert ff.pow(g, 3) == 1

    def test_trace_kernel_f8(self):
        """测试 F_8 中迹为零的元素恰有 4 个"""
        ff = FiniteField.of(2, 3)
        kernel = [a for a in ff.elements() if ff.sum([a, ff.frobenius(a, 1), ff.frobenius(a, 2)]) == 0]
        assert len(kernel) == 4

    def test_primitive_element(self):
        """测试本原元的阶为 q - 1"""
        ff = FiniteField.of(3, 2)
        g = ff.primitive_element()
        powers = {ff.pow(g, k) for k in range(8)}
        assert len(powers) == 8

    def test_size_cap(self):
        """测试超出枚举上限"""
        ff = field_ops(FieldSpec.canonical(2, 5), cap=16)
        with pytest.raises(SizeCapError):
            ff.elements()


class TestSubfields:
    """子域与次数"""

    def test_subfield_elements(self):
        """测试 F_16 中的 F_4"""
        ff = FiniteField.of(2, 4)
        sub = ff.subfield_elements(2)
        assert len(sub) == 4
        assert sub == sorted(sub)
        assert all(ff.is_in_subfield(a, 2) for a in sub)

    def test_iter_subfield_matches(self):
        """测试惰性枚举与排序枚举得到同一集合"""
        ff = FiniteField.of(3, 4)
        assert sorted(ff.iter_subfield(2)) == ff.subfield_elements(2)

    def test_not_a_subfield(self):
        """测试 F_8 不含 F_4"""
        with pytest.raises(InvalidFieldError):
            FiniteField.of(2, 3).subfield_elements(2)

    def test_degree_over(self):
        """测试元素在子域上的次数"""
        ff = FiniteField.of(2, 6)
        g = ff.primitive_element()
        assert ff.degree_over(g, 1) == 6
        assert ff.degree_over(1, 1) == 1
        assert ff.degree_over(ff.pow(g, 9), 1) == 3

    def test_working_field(self):
        """测试 F_4 上 3 次扩张的工作域为 F_64"""
        ff, e = working_field(4, 3)
        assert (ff.p, ff.m, e) == (2, 6, 2)
        with pytest.raises(InvalidFieldError):
            working_field(6, 1)


class TestTextAndEmbedding:
    """文本形式与嵌入"""

    def test_format_parse(self):
        """测试多项式文本形式"""
        ff = FiniteField.of(3, 2)
        a = ff.from_coefficients([1, 2])
        assert ff.format(a) == "2g+1"
        assert ff.parse("2g+1") == a
        assert ff.parse("-1") == 2
        assert ff.format(0) == "0"

    def test_parse_errors(self):
        """测试无法解析的文本"""
        ff = FiniteField.of(2, 2)
        with pytest.raises(ValueError):
            ff.parse("h")
        with pytest.raises(ValueError):
            ff.parse("g^2")

    def test_embedding_is_homomorphism(self):
        """测试 F_4 → F_16 的嵌入保持运算"""
        base = FiniteField.of(2, 2)
        target = FiniteField.of(2, 4)
        embed = FieldEmbedding(base, target)
        for a in base.elements():
            for b in base.elements():
                assert embed(base.mul(a, b)) == target.mul(embed(a), embed(b))
                assert embed(base.add(a, b)) == target.add(embed(a), embed(b))

    def test_prime_field_embedding_is_identity(self):
        """测试素域嵌入为恒等"""
        embed = FieldEmbedding(FiniteField.of(3, 1), FiniteField.of(3, 2))
        assert [embed(a) for a in range(3)] == [0, 1, 2]

    def test_incompatible_embedding(self):
        """测试不相容的嵌入"""
        with pytest.raises(InvalidFieldError):
            FieldEmbedding(FiniteField.of(2, 2), FiniteField.of(2, 3))
