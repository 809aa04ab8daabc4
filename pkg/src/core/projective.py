"""射影几何：射影点、闭点（Frobenius 轨道）、有限域上的线性代数与一般位置判定"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from sympy import divisors
from sympy.ntheory import mobius

from src.core.exceptions import GeometryInputError, SizeCapError
from src.core.finite_field import FiniteField, working_field

logger = logging.getLogger(__name__)

Coords = Tuple[int, ...]

# 二次与三次单项式的指数（x, y, z），顺序固定
CONIC_MONOMIALS: Tuple[Tuple[int, int, int], ...] = (
    (2, 0, 0), (1, 1, 0), (0, 2, 0), (1, 0, 1), (0, 1, 1), (0, 0, 2),
)
CUBIC_MONOMIALS: Tuple[Tuple[int, int, int], ...] = tuple(
    (a, b, 3 - a - b) for a in range(3, -1, -1) for b in range(3 - a, -1, -1)
)


@dataclass(frozen=True, order=True)
class ProjPoint:
    """射影点，首个非零坐标为 1；坐标是所属域的整数编码"""
    coords: Coords

    @classmethod
    def of(cls, ff: FiniteField, coords: Sequence[int]) -> "ProjPoint":
        return cls(normalize(ff, coords))

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def format(self, ff: FiniteField) -> str:
        return "(" + ":".join(ff.format(c) for c in self.coords) + ")"

    def __str__(self) -> str:
        return "(" + ":".join(str(c) for c in self.coords) + ")"


def normalize(ff: FiniteField, coords: Sequence[int]) -> Coords:
    """缩放使首个非零坐标为 1

    Raises:
        GeometryInputError: 坐标全为零
    """
    lead = next((c for c in coords if c), None)
    if lead is None:
        raise GeometryInputError("射影点的坐标不能全为零")
    if lead == 1:
        return tuple(coords)
    inv = ff.inv(lead)
    return tuple(ff.mul(c, inv) for c in coords)


def frobenius_point(ff: FiniteField, pt: ProjPoint, e: int) -> ProjPoint:
    """逐坐标作用 x ↦ x^{p^e}（归一化保持不变）"""
    return ProjPoint(tuple(ff.frobenius(c, e) for c in pt.coords))


def point_orbit(ff: FiniteField, pt: ProjPoint, e: int) -> List[ProjPoint]:
    """pt 在 F_{p^e}-Frobenius 下的轨道，从 pt 开始"""
    orbit = [pt]
    nxt = frobenius_point(ff, pt, e)
    while nxt != pt:
        orbit.append(nxt)
        nxt = frobenius_point(ff, nxt, e)
    return orbit


def point_degree(ff: FiniteField, pt: ProjPoint, e: int) -> int:
    return len(point_orbit(ff, pt, e))


@dataclass(frozen=True)
class ClosedPoint:
    """F_q 上的 d 次闭点：d 个几何点构成的 Frobenius 轨道"""
    q: int
    degree: int
    orbit: Tuple[ProjPoint, ...]

    def __post_init__(self):
        if len(self.orbit) != self.degree or len(set(self.orbit)) != self.degree:
            raise GeometryInputError(f"闭点轨道必须恰好含 {self.degree} 个不同的点")

    @classmethod
    def from_point(cls, ff: FiniteField, pt: ProjPoint, q: int, e: int) -> "ClosedPoint":
        orbit = point_orbit(ff, pt, e)
        return cls(q=q, degree=len(orbit), orbit=tuple(orbit))

    @property
    def generator(self) -> ProjPoint:
        return self.orbit[0]


def iter_projective_points(ff: FiniteField, n: int, elements: Optional[Sequence[int]] = None) -> Iterator[ProjPoint]:
    """按坐标字典序枚举 P^n 上坐标取自 elements 的归一化点"""
    elems = list(ff.elements()) if elements is None else list(elements)
    for lead in range(n + 1):
        # 首个非零坐标之后还有 lead 个自由坐标
        prefix = (0,) * (n - lead) + (1,)
        for tail in itertools.product(elems, repeat=lead):
            yield ProjPoint(prefix + tail)


def count_projective_points(size: int, n: int) -> int:
    return sum(size ** k for k in range(n + 1))


def count_closed_points(n: int, q: int, d: int) -> int:
    """P^n 上 F_q 的 d 次闭点个数（Möbius 反演，不做枚举）"""
    if d < 1:
        raise GeometryInputError(f"闭点次数必须 ≥ 1: {d}")
    total = sum(mobius(d // k) * count_projective_points(q ** k, n) for k in divisors(d))
    return total // d


def closed_points_of_degree(n: int, q: int, d: int, cap: Optional[int] = None) -> List[ClosedPoint]:
    """P^n (n = 1, 2) 上 F_q 的全部 d 次闭点，按轨道中字典序最小的几何点排序

    Raises:
        SizeCapError: q^{n·d} 超出枚举上限
    """
    if n not in (1, 2):
        raise GeometryInputError(f"只支持 P^1 与 P^2: n = {n}")
    if d < 1:
        raise GeometryInputError(f"闭点次数必须 ≥ 1: {d}")
    ff, e = working_field(q, d, cap)
    if (q ** d) ** n > ff.cap:
        raise SizeCapError(f"P^{n}(F_{q}^{d}) 的点数超出枚举上限 {ff.cap}")
    seen = set()
    out: List[ClosedPoint] = []
    for pt in iter_projective_points(ff, n):
        if pt in seen:
            continue
        orbit = point_orbit(ff, pt, e)
        if len(orbit) != d:
            continue
        seen.update(orbit)
        out.append(ClosedPoint(q=q, degree=d, orbit=tuple(orbit)))
    logger.debug(f"P^{n} 上 F_{q} 的 {d} 次闭点: {len(out)} 个")
    return out


# ---------------------------------------------------------------------------
# 有限域上的线性代数
# ---------------------------------------------------------------------------

def row_echelon(ff: FiniteField, rows: Sequence[Sequence[int]]) -> Tuple[List[List[int]], List[int]]:
    """化为简化行阶梯形，返回 (非零行, 主元列)"""
    mat = [list(r) for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = ff.inv(mat[r][c])
        mat[r] = [ff.mul(x, inv) for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                factor = mat[i][c]
                mat[i] = [ff.sub(x, ff.mul(factor, y)) for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank(ff: FiniteField, rows: Sequence[Sequence[int]]) -> int:
    return len(row_echelon(ff, rows)[1])


def kernel(ff: FiniteField, rows: Sequence[Sequence[int]], ncols: int) -> List[List[int]]:
    """零空间的一组基"""
    reduced, pivots = row_echelon(ff, rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(reduced, pivots):
            v[pc] = ff.neg(row[f])
        basis.append(v)
    return basis


def det3(ff: FiniteField, a: Coords, b: Coords, c: Coords) -> int:
    terms = [
        ff.mul(a[0], ff.sub(ff.mul(b[1], c[2]), ff.mul(b[2], c[1]))),
        ff.neg(ff.mul(a[1], ff.sub(ff.mul(b[0], c[2]), ff.mul(b[2], c[0])))),
        ff.mul(a[2], ff.sub(ff.mul(b[0], c[1]), ff.mul(b[1], c[0]))),
    ]
    return ff.sum(terms)


def monomial_value(ff: FiniteField, exps: Sequence[int], coords: Sequence[int]) -> int:
    value = 1
    for k, c in zip(exps, coords):
        if k:
            value = ff.mul(value, ff.pow(c, k))
    return value


def monomial_gradient(ff: FiniteField, exps: Sequence[int], coords: Sequence[int]) -> List[int]:
    out = []
    for i, k in enumerate(exps):
        if k % ff.p == 0:
            out.append(0)
            continue
        lowered = list(exps)
        lowered[i] -= 1
        out.append(ff.mul(ff.scalar(k), monomial_value(ff, lowered, coords)))
    return out


def conic_row(ff: FiniteField, pt: ProjPoint) -> List[int]:
    return [monomial_value(ff, m, pt.coords) for m in CONIC_MONOMIALS]


def cubic_row(ff: FiniteField, pt: ProjPoint) -> List[int]:
    return [monomial_value(ff, m, pt.coords) for m in CUBIC_MONOMIALS]


def cubic_gradient_rows(ff: FiniteField, pt: ProjPoint) -> List[List[int]]:
    """三个偏导数条件：第 j 行是各三次单项式对第 j 个变量的偏导在 pt 处的值"""
    grads = [monomial_gradient(ff, m, pt.coords) for m in CUBIC_MONOMIALS]
    return [[g[j] for g in grads] for j in range(3)]


def transform_point(ff: FiniteField, matrix: Sequence[Sequence[int]], pt: ProjPoint) -> ProjPoint:
    """射影变换 x ↦ A x"""
    coords = [ff.sum(ff.mul(a, x) for a, x in zip(row, pt.coords)) for row in matrix]
    return ProjPoint.of(ff, coords)


# ---------------------------------------------------------------------------
# 一般位置
# ---------------------------------------------------------------------------

@dataclass
class GeneralPositionReport:
    """一般位置判定结果；违例以点的下标元组记录"""
    ok: bool = True
    collinear: List[Tuple[int, int, int]] = field(default_factory=list)
    coconic: List[Tuple[int, ...]] = field(default_factory=list)
    singular_cubics: Dict[int, List[List[int]]] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def summary(self) -> str:
        if self.ok:
            return "一般位置"
        parts = []
        if self.collinear:
            parts.append(f"三点共线 {self.collinear[0]}")
        if self.coconic:
            parts.append(f"六点共二次曲线 {self.coconic[0]}")
        if self.singular_cubics:
            i = min(self.singular_cubics)
            parts.append(f"存在过全部点且在第 {i} 点奇异的三次曲线")
        return "; ".join(parts)


def collinear(ff: FiniteField, a: ProjPoint, b: ProjPoint, c: ProjPoint) -> bool:
    return det3(ff, a.coords, b.coords, c.coords) == 0


def coconic(ff: FiniteField, pts: Sequence[ProjPoint]) -> bool:
    """6 个点是否在同一条二次曲线上"""
    return rank(ff, [conic_row(ff, p) for p in pts]) < 6


def singular_cubic_kernel(ff: FiniteField, pts: Sequence[ProjPoint], i: int) -> List[List[int]]:
    """过全部点且在 pts[i] 处奇异的三次曲线所成线性系（系数按 CUBIC_MONOMIALS）"""
    rows = [cubic_row(ff, p) for p in pts] + cubic_gradient_rows(ff, pts[i])
    return kernel(ff, rows, len(CUBIC_MONOMIALS))


def is_general_position(ff: FiniteField, points: Sequence[ProjPoint], exhaustive: bool = True) -> GeneralPositionReport:
    """P^2 上至多 8 个几何点的一般位置判定

    条件：无三点共线；无六点共二次曲线；8 个点时，对每个 i，
    过全部点且在第 i 点奇异的三次曲线线性系为零。

    Args:
        ff: 所有坐标所在的公共域
        points: 几何点
        exhaustive: False 时发现第一个违例即返回

    Raises:
        GeometryInputError: 点数超过 8、不在 P^2 中或有重复点
    """
    pts = list(points)
    if len(pts) > 8:
        raise GeometryInputError(f"至多 8 个点: {len(pts)}")
    if any(p.dim != 2 for p in pts):
        raise GeometryInputError("一般位置判定只适用于 P^2 中的点")
    if len(set(pts)) != len(pts):
        raise GeometryInputError("点集中有重复的点")

    report = GeneralPositionReport()
    for idx in itertools.combinations(range(len(pts)), 3):
        if collinear(ff, *(pts[i] for i in idx)):
            report.ok = False
            report.collinear.append(idx)
            if not exhaustive:
                return report
    for idx in itertools.combinations(range(len(pts)), 6):
        if coconic(ff, [pts[i] for i in idx]):
            report.ok = False
            report.coconic.append(idx)
            if not exhaustive:
                return report
    if len(pts) == 8:
        for i in range(8):
            ker = singular_cubic_kernel(ff, pts, i)
            if ker:
                report.ok = False
                report.singular_cubics[i] = ker
                if not exhaustive:
                    return report
    return report


def parse_point(ff: FiniteField, text: str) -> ProjPoint:
    """解析 "x:y:z" 或 "(0:g:g:1)" 形式的射影点，坐标为生成元 g 的多项式

    Raises:
        GeometryInputError: 无法解析或坐标全为零
    """
    body = text.strip().strip("()")
    try:
        coords = [ff.parse(tok) for tok in body.split(":")]
    except ValueError as e:
        raise GeometryInputError(f"无法解析射影点 {text}: {e}") from e
    if len(coords) < 2:
        raise GeometryInputError(f"射影点至少需要两个坐标: {text}")
    return ProjPoint.of(ff, coords)
