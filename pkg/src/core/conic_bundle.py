"""二次 del Pezzo 曲面的二次曲线丛结构

Pic(X̄) 取基底 (C, F, E1, ..., E6)：C 为自交 0 的截面类，F 为纤维类，E_i 为退化纤维的分支。
    C·F = 1, C² = F² = 0, E_i² = -1，其余为 0；K = -2C - 2F + ΣE_i。
保持丛结构的格自同构群为 W(D6) = (Z/2)^5 ⋊ S6，元素记为 ι_S·σ（先作用 σ）：
    σ: E_i ↦ E_{σ(i)}
    ι_S: E_i ↦ F - E_i (i ∈ S), C ↦ C + (|S|/2)·F - Σ_{i∈S} E_i
"""
import itertools
import logging
import re
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.core.exceptions import InvalidElementError, MalformedClassError
from src.core.picard import GRAM as E7_GRAM
from src.core.picard import K as E7_K
from src.core.picard import DivisorClass
from src.core.weyl import Isometry

logger = logging.getLogger(__name__)

RANK = 8
N_FIBRES = 6
BASIS_NAMES = ("C", "F", "E1", "E2", "E3", "E4", "E5", "E6")

GRAM = np.zeros((RANK, RANK), dtype=np.int64)
GRAM[0, 1] = GRAM[1, 0] = 1
GRAM[2:, 2:] = -np.eye(N_FIBRES, dtype=np.int64)

# 截面类 C + aF - Σb_iE_i 的枚举窗口
SECTION_A_BOUND = 3
TWO_SECTION_A_BOUND = 6

WD6_ORDER = 23040


@dataclass(frozen=True)
class CBClass:
    """coeffs = (c, f, e1..e6)，代表 c·C + f·F + Σ e_i·E_i"""
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != RANK:
            raise MalformedClassError(f"二次曲线丛的类需要 {RANK} 个系数，收到 {len(self.coeffs)} 个")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @classmethod
    def of(cls, values: Iterable[int]) -> "CBClass":
        return cls(tuple(values))

    @classmethod
    def section(cls, a: int, flips: Iterable[int] = (), c: int = 1) -> "CBClass":
        """c·C + a·F - Σ_{i∈flips} E_i"""
        coeffs = [c, a] + [0] * N_FIBRES
        for i in flips:
            coeffs[i + 1] -= 1
        return cls(tuple(coeffs))

    def dot(self, other: "CBClass") -> int:
        a, b = self.coeffs, other.coeffs
        return a[0] * b[1] + a[1] * b[0] - sum(x * y for x, y in zip(a[2:], b[2:]))

    def __add__(self, other: "CBClass") -> "CBClass":
        return CBClass(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "CBClass") -> "CBClass":
        return CBClass(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CBClass":
        return CBClass(tuple(-a for a in self.coeffs))

    def __rmul__(self, k: int) -> "CBClass":
        return CBClass(tuple(k * a for a in self.coeffs))

    def as_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64)

    def __str__(self) -> str:
        parts = []
        for name, c in zip(BASIS_NAMES, self.coeffs):
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else str(abs(c))
            parts.append(f"{sign} {mag}{name}")
        if not parts:
            return "0"
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


def basis(name: str) -> CBClass:
    coeffs = [0] * RANK
    coeffs[BASIS_NAMES.index(name)] = 1
    return CBClass(tuple(coeffs))


C_CLASS = basis("C")
F_CLASS = basis("F")
K_CB = CBClass((-2, -2, 1, 1, 1, 1, 1, 1))

# 情形 (2) 的 2-截面 D 与反典范双覆盖分支除子的分量 R
D_CLASS = CBClass((2, 1, -1, -1, -1, -1, -1, -1))
R_CLASS = CBClass((2, 3, -1, -1, -1, -1, -1, -1))

# 各情形中自交为负的截面（规范化后的类）
TYPE3_SECTIONS = (CBClass.section(0, (1, 2)), CBClass.section(1, (3, 4, 5, 6)))
TYPE4_SECTIONS = (
    CBClass.section(0, (1, 2)),
    CBClass.section(0, (3, 4)),
    CBClass.section(0, (5, 6)),
    CBClass.section(2, (1, 2, 3, 4, 5, 6)),
)
TYPE5_SECTIONS = (CBClass.section(0, (1, 2, 3)), CBClass.section(0, (4, 5, 6)))


def intersect_cb(a: CBClass, b: CBClass) -> int:
    return a.dot(b)


def canonical_class_cb() -> CBClass:
    return K_CB


# ---------------------------------------------------------------------------
# W(D6)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WD6Element:
    """ι_S·σ；perm[i-1] = σ(i)"""
    flips: FrozenSet[int]
    perm: Tuple[int, ...] = tuple(range(1, N_FIBRES + 1))

    def __post_init__(self):
        object.__setattr__(self, "flips", frozenset(int(i) for i in self.flips))
        if len(self.flips) % 2:
            raise InvalidElementError(f"翻转集合的大小必须为偶数: {sorted(self.flips)}")
        if not self.flips <= set(range(1, N_FIBRES + 1)):
            raise InvalidElementError(f"翻转集合只能含 1..{N_FIBRES}: {sorted(self.flips)}")
        if sorted(self.perm) != list(range(1, N_FIBRES + 1)):
            raise InvalidElementError(f"不是 {{1..{N_FIBRES}}} 上的置换: {self.perm}")

    @classmethod
    def identity(cls) -> "WD6Element":
        return cls(frozenset())

    @classmethod
    def parse(cls, text: str) -> "WD6Element":
        return parse_wd6(text)

    def sigma(self, i: int) -> int:
        return self.perm[i - 1]

    def __mul__(self, other: "WD6Element") -> "WD6Element":
        """(ι_S σ)(ι_T τ) = ι_{S Δ σ(T)} (στ)"""
        moved = frozenset(self.sigma(i) for i in other.flips)
        perm = tuple(self.sigma(other.sigma(i)) for i in range(1, N_FIBRES + 1))
        return WD6Element(self.flips ^ moved, perm)

    def matrix(self) -> np.ndarray:
        """作用于列向量的 8×8 整数矩阵"""
        return _flip_matrix(self.flips) @ _perm_matrix(self.perm)

    def apply(self, v: CBClass) -> CBClass:
        return CBClass(tuple(self.matrix() @ v.as_array()))

    def cycle_type(self) -> Tuple[int, ...]:
        return tuple(sorted(len(c) for c in _cycles(self.perm)))

    def sort_key(self) -> Tuple:
        return (tuple(sorted(self.flips)), self.perm)

    def __str__(self) -> str:
        return format_wd6(self)


def _flip_matrix(flips: FrozenSet[int]) -> np.ndarray:
    m = np.eye(RANK, dtype=np.int64)
    # C ↦ C + (|S|/2)F - Σ_{i∈S} E_i
    m[1, 0] = len(flips) // 2
    for i in flips:
        m[i + 1, 0] = -1
        # E_i ↦ F - E_i
        m[1, i + 1] = 1
        m[i + 1, i + 1] = -1
    return m


def _perm_matrix(perm: Sequence[int]) -> np.ndarray:
    m = np.zeros((RANK, RANK), dtype=np.int64)
    m[0, 0] = m[1, 1] = 1
    for i, target in enumerate(perm, start=1):
        m[target + 1, i + 1] = 1
    return m


def _cycles(perm: Sequence[int]) -> List[List[int]]:
    seen = set()
    cycles = []
    for start in range(1, len(perm) + 1):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        nxt = perm[start - 1]
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = perm[nxt - 1]
        cycles.append(cycle)
    return cycles


_TEXT_RE = re.compile(r"^(?:i\{(?P<flips>[\d,\s]*)\})?(?P<cycles>(?:\(\d+\))*)$")


def parse_wd6(text: str) -> WD6Element:
    """解析 "i{1,2,3,5}(34)(56)" 形式；恒等元写作 "id"

    轮换从右向左复合。

    Raises:
        InvalidElementError: 无法解析、翻转集合为奇数或轮换不合法
    """
    s = text.strip().replace(" ", "")
    if s in ("id", "1", "e", ""):
        return WD6Element.identity()
    match = _TEXT_RE.match(s)
    if not match:
        raise InvalidElementError(f"无法解析 W(D6) 元素: {text}")
    flips_text = match.group("flips") or ""
    flips = frozenset(int(x) for x in flips_text.split(",") if x)
    perm = list(range(1, N_FIBRES + 1))
    for cycle_text in reversed(re.findall(r"\((\d+)\)", match.group("cycles"))):
        cycle = [int(ch) for ch in cycle_text]
        if len(set(cycle)) != len(cycle) or not all(1 <= x <= N_FIBRES for x in cycle):
            raise InvalidElementError(f"不合法的轮换 ({cycle_text}): {text}")
        step = {a: b for a, b in zip(cycle, cycle[1:] + cycle[:1])}
        perm = [step.get(x, x) for x in perm]
    return WD6Element(flips, tuple(perm))


def format_wd6(g: WD6Element) -> str:
    cycles = [c for c in _cycles(g.perm) if len(c) > 1]
    text = ""
    if g.flips:
        text = "i{" + ",".join(str(i) for i in sorted(g.flips)) + "}"
    text += "".join("(" + "".join(str(x) for x in c) + ")" for c in cycles)
    return text or "id"


def apply_wd6(g: WD6Element, v: CBClass) -> CBClass:
    return g.apply(v)


def wd6_generators() -> List[WD6Element]:
    """ι_{12} 与相邻对换 (i i+1)"""
    gens = [WD6Element(frozenset({1, 2}))]
    for i in range(1, N_FIBRES):
        perm = list(range(1, N_FIBRES + 1))
        perm[i - 1], perm[i] = perm[i], perm[i - 1]
        gens.append(WD6Element(frozenset(), tuple(perm)))
    return gens


@lru_cache(maxsize=1)
def _wd6_closure() -> Tuple[WD6Element, ...]:
    gens = wd6_generators()
    identity = WD6Element.identity()
    seen = {identity}
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = s * g
            if h not in seen:
                seen.add(h)
                queue.append(h)
    elements = tuple(sorted(seen, key=WD6Element.sort_key))
    logger.debug(f"W(D6) 闭包: {len(elements)} 个元素")
    return elements


def enumerate_wd6() -> List[WD6Element]:
    """由生成元闭包得到的 W(D6) 全部元素，按 (翻转集合, 置换) 排序"""
    return list(_wd6_closure())


def fibre_point_degrees(g: WD6Element) -> Tuple[int, ...]:
    """退化纤维所在闭点的次数 = σ 在 {1..6} 上的轮换型"""
    return g.cycle_type()


# ---------------------------------------------------------------------------
# 截面枚举
# ---------------------------------------------------------------------------

def sections_selfint(target: int, constraints: Sequence[CBClass] = ()) -> List[CBClass]:
    """所有截面类 C + aF - Σb_iE_i（a ≥ 0, b_i ∈ {0,1}），自交为 target 且与每个约束类相交非负

    按 (a, b) 字典序返回。
    """
    if not -3 <= target <= 0:
        raise ValueError(f"target 必须在 -3..0 之间: {target}")
    out = []
    for a in range(SECTION_A_BOUND + 1):
        for bits in itertools.product((0, 1), repeat=N_FIBRES):
            s = CBClass((1, a, *(-b for b in bits)))
            if s.dot(s) == target and all(s.dot(c) >= 0 for c in constraints):
                out.append(s)
    return out


def section_square_splits(first: CBClass = TYPE5_SECTIONS[0], second: CBClass = TYPE5_SECTIONS[1]) -> List[CBClass]:
    """检查对所有截面类 D = C + aF - Σb_iE_i（a ≤ 3, b_i ∈ {0,1}）有 D² = first·D + second·D，返回反例"""
    failures = []
    for a in range(SECTION_A_BOUND + 1):
        for bits in itertools.product((0, 1), repeat=N_FIBRES):
            d = CBClass((1, a, *(-b for b in bits)))
            if d.dot(d) != first.dot(d) + second.dot(d):
                failures.append(d)
    return failures


def two_section_scan(
    sections: Optional[Sequence[CBClass]] = None,
    special: CBClass = D_CLASS,
    a_max: int = TWO_SECTION_A_BOUND,
) -> List[CBClass]:
    """2-截面 H = 2C + aF - Σb_iE_i（0 ≤ a ≤ a_max, b_i ∈ {0,1,2}）中自交为负、
    与全部给定截面相交非负，且等于 special 或与 special 相交非负者"""
    if sections is None:
        sections = sections_selfint(-1)
    out = []
    for a in range(a_max + 1):
        for bits in itertools.product((0, 1, 2), repeat=N_FIBRES):
            h = CBClass((2, a, *(-b for b in bits)))
            if h.dot(h) >= 0:
                continue
            if any(h.dot(s) < 0 for s in sections):
                continue
            if h == special or h.dot(special) >= 0:
                out.append(h)
    return out


# ---------------------------------------------------------------------------
# 嵌入 E7 格
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def embedding_matrix() -> np.ndarray:
    """列为 C, F, E1..E6 在 (L, E1..E7) 基底下的像：
    C ↦ L-E1, F ↦ L-E2, E_i ↦ E_{i+2} (i ≤ 5), E6 ↦ L-E1-E2"""
    b = np.zeros((RANK, RANK), dtype=np.int64)
    b[:, 0] = (1, -1, 0, 0, 0, 0, 0, 0)
    b[:, 1] = (1, 0, -1, 0, 0, 0, 0, 0)
    for i in range(1, 6):
        b[i + 2, i + 1] = 1
    b[:, 7] = (1, -1, -1, 0, 0, 0, 0, 0)
    b.setflags(write=False)
    return b


@lru_cache(maxsize=1)
def embedding_inverse() -> np.ndarray:
    """B^{-1} = J_cb^{-1}·Bᵀ·J_e7（由 Bᵀ·J_e7·B = J_cb 且 J_cb² = I）"""
    inv = GRAM @ embedding_matrix().T @ E7_GRAM
    inv.setflags(write=False)
    return inv


def embed_into_e7(v: CBClass) -> DivisorClass:
    return DivisorClass(tuple(embedding_matrix() @ v.as_array()))


def embedding_preserves_form() -> bool:
    b = embedding_matrix()
    return bool(np.array_equal(b.T @ E7_GRAM @ b, GRAM)) and embed_into_e7(K_CB) == E7_K


def transport_to_e7(g: WD6Element) -> Isometry:
    """g 经嵌入得到的 W(E7) 元素 B·M_g·B^{-1}"""
    return Isometry(embedding_matrix() @ g.matrix() @ embedding_inverse())


def wd6_class_in_e7(g: WD6Element) -> int:
    """g 的像在 W(E7) 中的共轭类编号（1..60）"""
    from src.services.class_table import classify_element
    return classify_element(transport_to_e7(g))
