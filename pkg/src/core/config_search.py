"""爆破配置搜索：在 P^2_{F_q} 上寻找给定次数模式、处于一般位置的闭点组

搜索顺序（确定性）：
    1. 先放有理点槽位，再按次数升序放轨道槽位；
    2. 有理点：若没有使用参数曲线族，前 min(r, 4) 个固定为标准标架
       (1:0:0), (0:1:0), (0:0:1), (1:1:1)，其余按字典序升序选取；
    3. 次数 d ≤ 4 且 q^{2d} 不超过上限的轨道槽位：枚举 P^2(F_{q^d}) 中恰为 d 次、
       且为轨道中字典序最小者的点；
    4. 其余轨道槽位取参数曲线族上的点，如尖点三次曲线 (a³:a:1)，a 取 d 次元素的轨道代表。
只有全部槽位都是完整枚举时，穷尽结论才是完整的（complete=True）。
"""
import itertools
import logging
import re
from dataclasses import dataclass
from math import lcm
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from src.core.exceptions import (
    BudgetExceededError,
    GeometryInputError,
    InternalConsistencyError,
    UnsupportedPatternError,
)
from src.core.finite_field import FieldSpec, FiniteField, working_field
from src.core.projective import (
    ClosedPoint,
    ProjPoint,
    collinear,
    conic_row,
    is_general_position,
    iter_projective_points,
    monomial_value,
    point_orbit,
    rank,
    singular_cubic_kernel,
)
from src.models.schemas import ExhaustionReport, WitnessFile
from src.utils.monitoring import get_monitor

logger = logging.getLogger(__name__)

MAX_TOTAL_DEGREE = 8
MAX_ENUMERATED_DEGREE = 4

STANDARD_FRAME: Tuple[Tuple[int, int, int], ...] = ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1))


# ---------------------------------------------------------------------------
# 参数曲线
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParamCurve:
    """有理参数曲线 t ↦ (t^a : t^b : t^c)，equation 为其定义方程 {单项式指数: 系数}"""
    name: str
    exponents: Tuple[int, int, int]
    equation: Tuple[Tuple[Tuple[int, int, int], int], ...]

    def point(self, ff: FiniteField, t: int) -> ProjPoint:
        return ProjPoint.of(ff, [ff.pow(t, k) for k in self.exponents])

    def contains(self, ff: FiniteField, pt: ProjPoint) -> bool:
        total = 0
        for exps, c in self.equation:
            total = ff.add(total, ff.mul(ff.scalar(c), monomial_value(ff, exps, pt.coords)))
        return total == 0


CUSPIDAL_CUBIC = ParamCurve("x*z^2-y^3", (3, 1, 0), (((1, 0, 2), 1), ((0, 3, 0), -1)))
CONIC_P = ParamCurve("x*z-y^2", (2, 1, 0), (((1, 0, 1), 1), ((0, 2, 0), -1)))
CONIC_Q_CHOICES: Tuple[ParamCurve, ...] = (
    ParamCurve("x^2-y*z", (1, 2, 0), (((2, 0, 0), 1), ((0, 1, 1), -1))),
    ParamCurve("x*y-z^2", (2, 0, 1), (((1, 1, 0), 1), ((0, 0, 2), -1))),
)


# ---------------------------------------------------------------------------
# 模式
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pattern:
    """闭点次数的多重集；on_conics 表示 [5,3] 的二次曲线约束变体"""
    degrees: Tuple[int, ...]
    on_conics: bool = False

    @property
    def total(self) -> int:
        return sum(self.degrees)

    @property
    def text(self) -> str:
        counts: Dict[int, int] = {}
        for d in self.degrees:
            counts[d] = counts.get(d, 0) + 1
        parts = [str(d) if k == 1 else f"{d}x{k}" for d, k in sorted(counts.items(), reverse=True)]
        return ",".join(parts) + ("c" if self.on_conics else "")

    def __str__(self) -> str:
        return self.text


def parse_pattern(text: str) -> Pattern:
    """解析模式文本，如 "1x7"、"3,1x4"、"5,3"、"5,3c"

    Raises:
        UnsupportedPatternError: 无法解析，或总次数超过 8
    """
    s = text.strip().replace(" ", "").replace("^", "x")
    on_conics = s.endswith("c")
    if on_conics:
        s = s[:-1]
    degrees: List[int] = []
    for token in filter(None, s.split(",")):
        match = re.fullmatch(r"(\d+)(?:x(\d+))?", token)
        if not match:
            raise UnsupportedPatternError(f"无法解析模式: {text}")
        d, k = int(match.group(1)), int(match.group(2) or 1)
        if d < 1 or k < 1:
            raise UnsupportedPatternError(f"闭点次数与个数必须为正: {text}")
        degrees.extend([d] * k)
    if not degrees:
        raise UnsupportedPatternError(f"空模式: {text}")
    if sum(degrees) > MAX_TOTAL_DEGREE:
        raise UnsupportedPatternError(f"模式 {text} 的总次数 {sum(degrees)} 超过 {MAX_TOTAL_DEGREE}")
    if on_conics and sorted(degrees) != [3, 5]:
        raise UnsupportedPatternError(f"二次曲线约束只适用于模式 5,3: {text}")
    return Pattern(tuple(sorted(degrees, reverse=True)), on_conics)


# ---------------------------------------------------------------------------
# 结果
# ---------------------------------------------------------------------------

@dataclass
class SearchOptions:
    frame_normalize: bool = True
    max_nodes: Optional[int] = None
    cap: Optional[int] = None
    conic_choices: Tuple[ParamCurve, ...] = CONIC_Q_CHOICES


@dataclass
class Witness:
    """找到的配置"""
    pattern: Pattern
    q: int
    field: FiniteField
    e: int
    closed_points: List[ClosedPoint]
    conics: Optional[List[str]] = None
    nodes_visited: int = 0

    @property
    def geometric_points(self) -> List[ProjPoint]:
        return [pt for cp in self.closed_points for pt in cp.orbit]

    def to_file(self) -> WitnessFile:
        ff = self.field
        return WitnessFile(
            q=self.q,
            p=ff.p,
            m=ff.m,
            modulus=list(ff.spec.modulus),
            pattern=self.pattern.text,
            points=[[[ff.coefficients(c) for c in pt.coords] for pt in cp.orbit] for cp in self.closed_points],
            conics=self.conics,
        )

    def describe(self) -> List[str]:
        return [
            f"次数 {cp.degree}: " + ", ".join(pt.format(self.field) for pt in cp.orbit)
            for cp in self.closed_points
        ]


@dataclass
class Exhausted:
    """搜索空间已穷尽，没有找到配置"""
    pattern: Pattern
    q: int
    complete: bool
    normalization: str
    nodes_visited: int

    def to_report(self) -> ExhaustionReport:
        return ExhaustionReport(
            q=self.q,
            pattern=self.pattern.text,
            complete=self.complete,
            normalization=self.normalization,
            nodes_visited=self.nodes_visited,
        )


# ---------------------------------------------------------------------------
# 候选
# ---------------------------------------------------------------------------

class _LazyCandidates:
    """按需展开的候选序列，同次数的多个槽位共享"""

    def __init__(self, source: Iterator[Tuple[ProjPoint, ...]]):
        self._source = source
        self._items: List[Tuple[ProjPoint, ...]] = []
        self._done = False

    def iter_from(self, start: int) -> Iterator[Tuple[int, Tuple[ProjPoint, ...]]]:
        i = start
        while True:
            while i >= len(self._items) and not self._done:
                try:
                    self._items.append(next(self._source))
                except StopIteration:
                    self._done = True
            if i >= len(self._items):
                return
            yield i, self._items[i]
            i += 1


@dataclass
class _Slot:
    degree: int
    kind: str  # "frame" | "points" | "curve"
    group: str
    frame_point: Optional[ProjPoint] = None
    curve: Optional[ParamCurve] = None


class _Search:
    """一次搜索的状态"""

    def __init__(self, pattern: Pattern, q: int, options: SearchOptions):
        self.pattern = pattern
        self.q = q
        self.options = options
        degrees = sorted(set(pattern.degrees))
        self.ff, self.e = working_field(q, lcm(*degrees), options.cap)
        self.cap = self.ff.cap
        self.nodes = 0
        self._conic_rows: Dict[ProjPoint, List[int]] = {}
        self._candidates: Dict[str, _LazyCandidates] = {}

    # ---------------------------------------------------------------- 槽位
    def plan(self, conic_q: Optional[ParamCurve] = None) -> Tuple[List[_Slot], bool]:
        """返回 (槽位列表, 是否完整枚举)"""
        if self.pattern.on_conics:
            return [_Slot(3, "curve", "curve3", curve=conic_q), _Slot(5, "curve", "curve5", curve=CONIC_P)], False

        orbit_degrees = sorted(d for d in self.pattern.degrees if d > 1)
        uses_family = any(not self._enumerable(d) for d in orbit_degrees)
        slots: List[_Slot] = []
        r = self.pattern.degrees.count(1)
        normalize = self.options.frame_normalize and not uses_family
        for i in range(r):
            if normalize and i < len(STANDARD_FRAME):
                slots.append(_Slot(1, "frame", "frame", frame_point=ProjPoint(STANDARD_FRAME[i])))
            else:
                slots.append(_Slot(1, "points", "points1"))
        for d in orbit_degrees:
            if self._enumerable(d):
                slots.append(_Slot(d, "points", f"points{d}"))
            else:
                slots.append(_Slot(d, "curve", f"curve{d}", curve=CUSPIDAL_CUBIC))
        return slots, not uses_family

    def _enumerable(self, d: int) -> bool:
        return d <= MAX_ENUMERATED_DEGREE and (self.q ** d) ** 2 <= self.cap

    def normalization(self, complete: bool) -> str:
        if self.pattern.on_conics:
            return f"5 次点取在 {CONIC_P.name}=0 上，3 次点取在 " + " 或 ".join(c.name for c in self.options.conic_choices) + " 上；参数取轨道代表"
        parts = []
        if complete and self.options.frame_normalize and 1 in self.pattern.degrees:
            parts.append("前 min(r,4) 个有理点固定为标准标架，其余有理点按字典序升序")
        elif 1 in self.pattern.degrees:
            parts.append("有理点按字典序升序")
        if any(d > 1 for d in self.pattern.degrees):
            if complete:
                parts.append("每个轨道取字典序最小的几何点，同次数轨道升序")
            else:
                parts.append(f"高次轨道取在 {CUSPIDAL_CUBIC.name}=0 上（仅部分搜索空间）")
        return "；".join(parts)

    def _points_source(self, d: int) -> Iterator[Tuple[ProjPoint, ...]]:
        elems = self.ff.subfield_elements(self.e * d)
        for pt in iter_projective_points(self.ff, 2, elems):
            orbit = point_orbit(self.ff, pt, self.e)
            if len(orbit) == d and pt == min(orbit):
                yield tuple(orbit)

    def _curve_source(self, d: int, curve: ParamCurve) -> Iterator[Tuple[ProjPoint, ...]]:
        for t in self.ff.iter_subfield(self.e * d):
            if self.ff.degree_over(t, self.e) != d:
                continue
            conjugates = [self.ff.frobenius(t, self.e * i) for i in range(d)]
            if t != min(conjugates):
                continue
            orbit = point_orbit(self.ff, curve.point(self.ff, t), self.e)
            if len(orbit) == d:
                yield tuple(orbit)

    def candidates(self, slot: _Slot) -> _LazyCandidates:
        key = slot.group if slot.curve is None else f"{slot.group}:{slot.curve.name}"
        if key not in self._candidates:
            if slot.kind == "curve":
                source = self._curve_source(slot.degree, slot.curve)
            else:
                source = self._points_source(slot.degree)
            self._candidates[key] = _LazyCandidates(source)
        return self._candidates[key]

    # ---------------------------------------------------------------- 检查
    def _conic_row(self, pt: ProjPoint) -> List[int]:
        row = self._conic_rows.get(pt)
        if row is None:
            row = conic_row(self.ff, pt)
            self._conic_rows[pt] = row
        return row

    def accepts(self, existing: Sequence[ProjPoint], new: Sequence[ProjPoint]) -> bool:
        """加入 new 后仍无三点共线、无六点共二次曲线；凑满 8 点时检查奇异三次曲线"""
        seen = set(existing)
        for pt in new:
            if pt in seen:
                return False
            seen.add(pt)
        pts = list(existing) + list(new)
        start = len(existing)
        ff = self.ff
        for idx in itertools.combinations(range(len(pts)), 3):
            if idx[-1] >= start and collinear(ff, *(pts[i] for i in idx)):
                return False
        for idx in itertools.combinations(range(len(pts)), 6):
            if idx[-1] >= start and rank(ff, [self._conic_row(pts[i]) for i in idx]) < 6:
                return False
        if len(pts) == 8:
            return all(not singular_cubic_kernel(ff, pts, i) for i in range(8))
        return True

    # ---------------------------------------------------------------- DFS
    def run(self, slots: List[_Slot]) -> Optional[List[Tuple[ProjPoint, ...]]]:
        chosen: List[Tuple[ProjPoint, ...]] = []
        last_index: Dict[str, int] = {}

        def dfs(k: int, points: List[ProjPoint]) -> bool:
            if k == len(slots):
                return True
            slot = slots[k]
            if slot.kind == "frame":
                self._tick()
                new = (slot.frame_point,)
                if self.accepts(points, new):
                    chosen.append(new)
                    if dfs(k + 1, points + list(new)):
                        return True
                    chosen.pop()
                return False
            start = last_index.get(slot.group, -1) + 1
            for i, orbit in self.candidates(slot).iter_from(start):
                if slot.kind == "points" and slot.degree == 1 and orbit[0].coords in STANDARD_FRAME \
                        and any(s.kind == "frame" for s in slots):
                    continue
                self._tick()
                if not self.accepts(points, orbit):
                    continue
                previous = last_index.get(slot.group)
                last_index[slot.group] = i
                chosen.append(orbit)
                if dfs(k + 1, points + list(orbit)):
                    return True
                chosen.pop()
                if previous is None:
                    del last_index[slot.group]
                else:
                    last_index[slot.group] = previous
            return False

        return list(chosen) if dfs(0, []) else None

    def _tick(self):
        self.nodes += 1
        if self.options.max_nodes is not None and self.nodes > self.options.max_nodes:
            raise BudgetExceededError(
                f"搜索节点数超过上限 {self.options.max_nodes}",
                progress={"nodes_visited": self.nodes, "pattern": self.pattern.text, "q": self.q},
            )


def search_blowup_config(pattern, q: int, options: Optional[SearchOptions] = None):
    """在 P^2_{F_q} 上搜索给定模式的一般位置配置

    Args:
        pattern: Pattern 或其文本形式
        q: 素数幂
        options: 搜索选项

    Returns:
        Witness 或 Exhausted

    Raises:
        UnsupportedPatternError: 模式无法解析或总次数超过 8
        BudgetExceededError: 超过 max_nodes
    """
    pattern = parse_pattern(pattern) if isinstance(pattern, str) else pattern
    options = options or SearchOptions()
    with get_monitor().track_stage("search"):
        search = _Search(pattern, q, options)
        conic_choices: Sequence[Optional[ParamCurve]] = options.conic_choices if pattern.on_conics else (None,)
        complete = True
        for conic_q in conic_choices:
            slots, slot_complete = search.plan(conic_q)
            complete = complete and slot_complete
            found = search.run(slots)
            if found is None:
                continue
            closed = [ClosedPoint(q=q, degree=len(orbit), orbit=orbit) for orbit in found]
            conics = [CONIC_P.name, conic_q.name] if conic_q is not None else None
            witness = Witness(pattern, q, search.ff, search.e, closed, conics, search.nodes)
            _reverify(witness)
            logger.info(f"模式 {pattern} 在 F_{q} 上找到配置（{search.nodes} 个节点）")
            return witness
        logger.info(f"模式 {pattern} 在 F_{q} 上搜索空间已穷尽（{search.nodes} 个节点，complete={complete}）")
        return Exhausted(pattern, q, complete, search.normalization(complete), search.nodes)


# ---------------------------------------------------------------------------
# 独立复核
# ---------------------------------------------------------------------------

def _check_orbits(ff: FiniteField, e: int, closed_points: Sequence[ClosedPoint]):
    for cp in closed_points:
        orbit = point_orbit(ff, cp.orbit[0], e)
        if len(orbit) != cp.degree or set(orbit) != set(cp.orbit):
            raise InternalConsistencyError(f"闭点 {cp.orbit[0].format(ff)} 的轨道与声明的次数 {cp.degree} 不符")


def _reverify(witness: Witness):
    ff = witness.field
    _check_orbits(ff, witness.e, witness.closed_points)
    degrees = sorted((cp.degree for cp in witness.closed_points), reverse=True)
    if tuple(degrees) != witness.pattern.degrees:
        raise InternalConsistencyError(f"见证的次数 {degrees} 与模式 {witness.pattern} 不符")
    report = is_general_position(ff, witness.geometric_points)
    if not report:
        raise InternalConsistencyError(f"见证未通过一般位置复核: {report.summary()}")
    if witness.pattern.on_conics:
        curves = {c.name: c for c in (CONIC_P, *CONIC_Q_CHOICES)}
        p_curve, q_curve = (curves[name] for name in witness.conics)
        by_degree = {cp.degree: cp for cp in witness.closed_points}
        if not all(p_curve.contains(ff, pt) for pt in by_degree[5].orbit):
            raise InternalConsistencyError("5 次点不在二次曲线 P 上")
        if not all(q_curve.contains(ff, pt) for pt in by_degree[3].orbit):
            raise InternalConsistencyError("3 次点不在二次曲线 Q 上")


def witness_from_file(data: WitnessFile) -> Witness:
    """从见证文件恢复 Witness（模多项式会重新检查不可约性）"""
    pattern = parse_pattern(data.pattern)
    ff = FiniteField(FieldSpec(data.p, data.m, tuple(data.modulus)))
    e = 0
    value = data.q
    while value % data.p == 0:
        value //= data.p
        e += 1
    if value != 1 or e == 0 or data.m % e:
        raise GeometryInputError(f"见证文件中的 q = {data.q} 与工作域 F_{data.p}^{data.m} 不相容")
    closed = []
    for orbit in data.points:
        pts = tuple(ProjPoint.of(ff, [ff.from_coefficients(c) for c in coords]) for coords in orbit)
        closed.append(ClosedPoint(q=data.q, degree=len(pts), orbit=pts))
    return Witness(pattern, data.q, ff, e, closed, data.conics)


def verify_witness(data: WitnessFile) -> Witness:
    """独立复核见证文件

    Raises:
        InternalConsistencyError: 复核失败
    """
    witness = witness_from_file(data)
    _reverify(witness)
    return witness
