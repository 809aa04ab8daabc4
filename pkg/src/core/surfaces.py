"""显式方程给出的超曲面：点数、Eckardt 点判定、平面曲线奇点分析

方程文件格式：每行 "coeff,e0,e1,e2[,e3]"，coeff 为生成元 g 的多项式（如 "g+1"、"-1"），
空行与 # 开头的行忽略。四个指数对应 P^3 (x:y:z:t)，三个对应 P^2 (x:y:z)。
"""
import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

from src.core.exceptions import GeometryInputError
from src.core.finite_field import FieldEmbedding, FiniteField
from src.core.projective import ProjPoint, iter_projective_points, kernel, monomial_gradient, monomial_value, rank
from src.models.schemas import EckardtReport, SingularityReport

logger = logging.getLogger(__name__)

VARIABLES = {2: ("x", "y", "z"), 3: ("x", "y", "z", "t")}

Exps = Tuple[int, ...]
Poly = Dict[Exps, int]


# ---------------------------------------------------------------------------
# 多项式小工具（系数在 FiniteField 中）
# ---------------------------------------------------------------------------

def _poly_add_into(ff: FiniteField, acc: Poly, other: Poly, scale: int = 1):
    for exps, c in other.items():
        value = ff.add(acc.get(exps, 0), ff.mul(scale, c))
        if value:
            acc[exps] = value
        else:
            acc.pop(exps, None)


def _poly_mul(ff: FiniteField, a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            exps = tuple(x + y for x, y in zip(ea, eb))
            value = ff.add(out.get(exps, 0), ff.mul(ca, cb))
            if value:
                out[exps] = value
            else:
                out.pop(exps, None)
    return out


def _substitute(ff: FiniteField, terms: Sequence[Tuple[Exps, int]], forms: Sequence[Poly], nvars: int) -> Poly:
    """把第 i 个变量替换为多项式 forms[i]"""
    out: Poly = {}
    one: Poly = {(0,) * nvars: 1}
    for exps, c in terms:
        prod = one
        for form, k in zip(forms, exps):
            for _ in range(k):
                prod = _poly_mul(ff, prod, form)
        _poly_add_into(ff, out, prod, c)
    return out


def _linear_form(values: Sequence[int], nvars: int, constant: int = 0) -> Poly:
    """constant + Σ values[j]·X_j（values 与变量一一对应）"""
    form: Poly = {}
    if constant:
        form[(0,) * nvars] = constant
    for j, v in enumerate(values):
        if v:
            exps = [0] * nvars
            exps[j] = 1
            form[tuple(exps)] = v
    return form


def _format_poly(ff: FiniteField, poly: Poly, names: Sequence[str]) -> str:
    if not poly:
        return "0"
    parts = []
    for exps in sorted(poly, reverse=True):
        c = poly[exps]
        mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, exps) if k)
        coeff = ff.format(c)
        if not mono:
            parts.append(coeff)
        elif c == 1:
            parts.append(mono)
        else:
            parts.append(f"({coeff})*{mono}" if "+" in coeff else f"{coeff}*{mono}")
    return " + ".join(parts)


def binary_roots(ff: FiniteField, coeffs: Sequence[int]) -> List[Tuple[int, int]]:
    """二元形式 Σ coeffs[i]·a^{k-i}·b^i 在 P^1(ff) 中的零点 (a:b)"""
    k = len(coeffs) - 1

    def value(a, b):
        return ff.sum(ff.mul(c, ff.mul(ff.pow(a, k - i), ff.pow(b, i))) for i, c in enumerate(coeffs))

    roots = [(0, 1)] if value(0, 1) == 0 else []
    roots.extend((1, b) for b in ff.elements() if value(1, b) == 0)
    return roots


def cubic_discriminant(ff: FiniteField, a: int, b: int, c: int, d: int) -> int:
    """二元三次形式 a·X³ + b·X²Y + c·XY² + d·Y³ 的判别式
    b²c² − 4ac³ − 4b³d − 27a²d² + 18abcd，在任意特征下为零当且仅当有重根"""
    m, s = ff.mul, ff.scalar
    terms = [
        m(m(b, b), m(c, c)),
        m(s(-4), m(a, m(c, m(c, c)))),
        m(s(-4), m(m(b, m(b, b)), d)),
        m(s(-27), m(m(a, a), m(d, d))),
        m(s(18), m(m(a, b), m(c, d))),
    ]
    return ff.sum(terms)


# ---------------------------------------------------------------------------
# 超曲面
# ---------------------------------------------------------------------------

@dataclass
class HyperSurface:
    """P^n (n = 2, 3) 中的齐次多项式 F = Σ c·x^e"""
    ff: FiniteField
    terms: List[Tuple[Exps, int]]
    dim: int
    degree: int = field(init=False)

    def __post_init__(self):
        if self.dim not in VARIABLES:
            raise GeometryInputError(f"只支持 P^2 与 P^3 中的超曲面: n = {self.dim}")
        merged: Poly = {}
        for exps, c in self.terms:
            if len(exps) != self.dim + 1:
                raise GeometryInputError(f"单项式 {exps} 的变量个数与 P^{self.dim} 不符")
            _poly_add_into(self.ff, merged, {tuple(exps): c})
        if not merged:
            raise GeometryInputError("多项式的系数全为零")
        degrees = {sum(e) for e in merged}
        if len(degrees) != 1:
            raise GeometryInputError(f"多项式不是齐次的，出现次数 {sorted(degrees)}")
        self.terms = sorted(merged.items(), reverse=True)
        self.degree = degrees.pop()

    @classmethod
    def parse(cls, text: str, ff: FiniteField) -> "HyperSurface":
        """解析方程文本

        Raises:
            GeometryInputError: 格式错误、非齐次或系数全为零
        """
        terms = []
        arity = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) not in (4, 5):
                raise GeometryInputError(f"第 {lineno} 行应为 coeff,e0,e1,e2[,e3]: {raw!r}")
            if arity is not None and len(parts) != arity:
                raise GeometryInputError(f"第 {lineno} 行的指数个数与前文不一致")
            arity = len(parts)
            try:
                coeff = ff.parse(parts[0])
                exps = tuple(int(p) for p in parts[1:])
            except ValueError as e:
                raise GeometryInputError(f"第 {lineno} 行无法解析: {e}") from e
            if any(k < 0 for k in exps):
                raise GeometryInputError(f"第 {lineno} 行出现负指数")
            terms.append((exps, coeff))
        if arity is None:
            raise GeometryInputError("方程文件为空")
        return cls(ff, terms, arity - 2)

    @classmethod
    def load(cls, path, ff: FiniteField) -> "HyperSurface":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise GeometryInputError(f"无法读取方程文件 {path}: {e}") from e
        return cls.parse(text, ff)

    @property
    def names(self) -> Tuple[str, ...]:
        return VARIABLES[self.dim]

    def evaluate(self, coords: Sequence[int]) -> int:
        ff = self.ff
        return ff.sum(ff.mul(c, monomial_value(ff, e, coords)) for e, c in self.terms)

    def gradient(self, coords: Sequence[int]) -> List[int]:
        ff = self.ff
        grad = [0] * (self.dim + 1)
        for exps, c in self.terms:
            for i, g in enumerate(monomial_gradient(ff, exps, coords)):
                if g:
                    grad[i] = ff.add(grad[i], ff.mul(c, g))
        return grad

    def contains(self, pt: ProjPoint) -> bool:
        return self.evaluate(pt.coords) == 0

    def _require_point(self, pt: ProjPoint):
        if pt.dim != self.dim:
            raise GeometryInputError(f"点 {pt.format(self.ff)} 不在 P^{self.dim} 中")
        if not self.contains(pt):
            raise GeometryInputError(f"点 {pt.format(self.ff)} 不在超曲面上")

    def __str__(self) -> str:
        return _format_poly(self.ff, dict(self.terms), self.names) + " = 0"


def surface_point_count(surface: HyperSurface) -> Tuple[int, List[ProjPoint]]:
    """超曲面在其系数域上的全部有理点（按字典序）

    Raises:
        SizeCapError: 域规模超出上限
    """
    ff = surface.ff
    points = [pt for pt in iter_projective_points(ff, surface.dim) if surface.contains(pt)]
    logger.debug(f"{surface} 上有 {len(points)} 个有理点")
    return len(points), points


# ---------------------------------------------------------------------------
# Eckardt 点
# ---------------------------------------------------------------------------

@dataclass
class EckardtAnalysis:
    """切平面截线 G(s, a, b) = s·Q(a, b) + C(a, b)，其中 x = sP + a·u + b·v"""
    point: ProjPoint
    tangent_plane: List[int]
    basis: Tuple[Tuple[int, ...], Tuple[int, ...]]
    quadric: List[int]
    cubic: List[int]
    discriminant: int
    is_eckardt: bool
    lines: List[Tuple[ProjPoint, ProjPoint]]
    extension: FiniteField

    def to_report(self, ff: FiniteField) -> EckardtReport:
        return EckardtReport(
            point=self.point.format(ff),
            tangent_plane=[ff.format(c) for c in self.tangent_plane],
            lines_through_point=[
                f"{a.format(self.extension)} -- {b.format(self.extension)}" for a, b in self.lines
            ],
            is_eckardt=self.is_eckardt,
        )


def _plane_basis(ff: FiniteField, pt: ProjPoint, plane: Sequence[int]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """切平面中与 P 一起构成基的两个向量"""
    vectors = [tuple(v) for v in kernel(ff, [list(plane)], len(plane))]
    for u, v in itertools.combinations(vectors, 2):
        if rank(ff, [list(pt.coords), list(u), list(v)]) == 3:
            return u, v
    raise GeometryInputError("无法在切平面中选出基")


def eckardt_analysis(surface: HyperSurface, pt: ProjPoint, extension_degree: int = 1) -> EckardtAnalysis:
    """立方曲面上光滑点的 Eckardt 判定及过该点的直线

    切平面与曲面的交是在 P 处奇异的平面三次曲线 G = s·Q + C；P 是 Eckardt 点
    当且仅当 Q ≡ 0 且 C 的三个根互不相同（判别式非零），这在代数闭包上成立。
    过 P 的直线对应 Q 与 C 的公共零点，在 extension_degree 次扩张域中列出。

    Raises:
        GeometryInputError: 不是 P^3 中的三次曲面、点不在曲面上或曲面在该点奇异
    """
    ff = surface.ff
    if surface.dim != 3 or surface.degree != 3:
        raise GeometryInputError("Eckardt 判定只适用于 P^3 中的三次曲面")
    surface._require_point(pt)
    plane = surface.gradient(pt.coords)
    if not any(plane):
        raise GeometryInputError(f"曲面在 {pt.format(ff)} 处奇异")

    u, v = _plane_basis(ff, pt, plane)
    forms = [
        _linear_form([pt.coords[i], u[i], v[i]], 3)
        for i in range(4)
    ]
    g = _substitute(ff, surface.terms, forms, 3)
    if any(exps[0] >= 2 for exps in g):
        raise GeometryInputError("切平面截线在 P 处不奇异，计算有误")
    quadric = [g.get((1, 2 - i, i), 0) for i in range(3)]
    cubic = [g.get((0, 3 - i, i), 0) for i in range(4)]
    disc = cubic_discriminant(ff, *cubic)
    is_eckardt = not any(quadric) and any(cubic) and disc != 0

    ext = FiniteField.of(ff.p, ff.m * extension_degree) if extension_degree > 1 else ff
    embed = FieldEmbedding(ff, ext) if ext is not ff else (lambda a: a)
    q_ext = [embed(c) for c in quadric]
    c_ext = [embed(c) for c in cubic]
    p_ext = ProjPoint.of(ext, [embed(c) for c in pt.coords])
    u_ext = [embed(c) for c in u]
    v_ext = [embed(c) for c in v]
    lines = []
    for a, b in binary_roots(ext, c_ext):
        qa = ext.sum(ext.mul(c, ext.mul(ext.pow(a, 2 - i), ext.pow(b, i))) for i, c in enumerate(q_ext))
        if qa:
            continue
        w = [ext.add(ext.mul(a, x), ext.mul(b, y)) for x, y in zip(u_ext, v_ext)]
        lines.append((p_ext, ProjPoint.of(ext, w)))
    logger.debug(f"点 {pt.format(ff)}: Q={quadric} C={cubic} disc={disc} 直线 {len(lines)} 条")
    return EckardtAnalysis(pt, plane, (u, v), quadric, cubic, disc, is_eckardt, lines, ext)


# ---------------------------------------------------------------------------
# 平面曲线奇点
# ---------------------------------------------------------------------------

@dataclass
class SingularityAnalysis:
    point: ProjPoint
    multiplicity: int
    tangent_cone: Poly
    cone_factors: List[Tuple[int, int]]
    is_node: bool
    chart_names: Tuple[str, str]

    @property
    def is_singular(self) -> bool:
        return self.multiplicity >= 2

    def to_report(self, ff: FiniteField) -> SingularityReport:
        a, b = self.chart_names
        return SingularityReport(
            point=self.point.format(ff),
            is_singular=self.is_singular,
            multiplicity=self.multiplicity,
            tangent_cone=[_format_poly(ff, self.tangent_cone, self.chart_names)],
            tangent_cone_factors=[
                f"{ff.format(y)}*{a} - {ff.format(x)}*{b}" for x, y in self.cone_factors
            ],
            is_node=self.is_node,
        )


def curve_singularity_analysis(curve: HyperSurface, pt: ProjPoint) -> SingularityAnalysis:
    """平面曲线在一点的重数、切锥与是否为结点

    在 P 的首个非零坐标所在的仿射图中把 P 平移到原点，最低次齐次部分即切锥；
    结点 = 重数 2 且切锥 c0·X² + c1·XY + c2·Y² 的判别式 c1² − 4c0c2 非零。

    Raises:
        GeometryInputError: 不是平面曲线或点不在曲线上
    """
    ff = curve.ff
    if curve.dim != 2:
        raise GeometryInputError("奇点分析只适用于 P^2 中的曲线")
    curve._require_point(pt)
    chart = next(i for i, c in enumerate(pt.coords) if c)
    others = [i for i in range(3) if i != chart]
    forms: List[Poly] = []
    for i in range(3):
        if i == chart:
            forms.append({(0, 0): 1})
        else:
            values = [1 if j == i else 0 for j in others]
            forms.append(_linear_form(values, 2, constant=pt.coords[i]))
    local = _substitute(ff, curve.terms, forms, 2)
    if local.get((0, 0), 0):
        raise GeometryInputError("平移后常数项非零，点不在曲线上")
    multiplicity = min(sum(e) for e in local)
    cone = {e: c for e, c in local.items() if sum(e) == multiplicity}
    coeffs = [cone.get((multiplicity - i, i), 0) for i in range(multiplicity + 1)]
    factors = binary_roots(ff, coeffs) if ff.size <= ff.cap else []
    is_node = False
    if multiplicity == 2:
        c0, c1, c2 = coeffs
        disc = ff.sub(ff.mul(c1, c1), ff.mul(ff.scalar(4), ff.mul(c0, c2)))
        is_node = disc != 0
    names = tuple(curve.names[i] for i in others)
    # 线性因子 y·X − x·Y 对应切锥零点 (X:Y) = (x:y)
    return SingularityAnalysis(pt, multiplicity, cone, factors, is_node, (names[0], names[1]))
