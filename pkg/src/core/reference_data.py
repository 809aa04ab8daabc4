"""W(E7) 共轭类参考数据与有限域上存在性结论

特征值记号（K^⊥ 上的 7 个特征值）：
    "1", "-1", "i", "-i", "w"(ω), "w2"(ω²), "x5^3"(ξ_5^3) 以及它们的乘积，如 "-iw2" = -i·ω²。
每个记号解析为单位根的角度（模 1 的分数）。
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Dict, FrozenSet, List, Optional, Tuple

from src.core.exceptions import InternalConsistencyError


@dataclass(frozen=True)
class CarterRow:
    """参考表中的一行"""
    class_id: int
    carter_label: str
    order: int
    eigen_tokens: Tuple[str, ...]
    rho: int
    geiser: int


def _row(class_id, label, order, tokens, rho, geiser) -> CarterRow:
    return CarterRow(class_id, label, order, tuple(tokens.split()), rho, geiser)


X5 = "x5^1 x5^2 x5^3 x5^4"
X8 = "x8^1 x8^3 x8^5 x8^7"

CARTER_ROWS: Tuple[CarterRow, ...] = (
    _row(1, "∅", 1, "1 1 1 1 1 1 1", 8, 49),
    _row(2, "A1", 2, "1 1 1 1 1 1 -1", 7, 31),
    _row(3, "A1^2", 2, "1 1 1 1 1 -1 -1", 6, 18),
    _row(4, "A2", 3, "1 1 1 1 1 w w2", 6, 53),
    _row(5, "A1^3", 2, "1 1 1 1 -1 -1 -1", 5, 9),
    _row(6, "A1^3", 2, "1 1 1 1 -1 -1 -1", 5, 10),
    _row(7, "A2xA1", 6, "1 1 1 1 -1 w w2", 5, 40),
    _row(8, "A3", 4, "1 1 1 1 i -1 -i", 5, 33),
    _row(9, "A1^4", 2, "1 1 1 -1 -1 -1 -1", 4, 5),
    _row(10, "A1^4", 2, "1 1 1 -1 -1 -1 -1", 4, 6),
    _row(11, "A2xA1^2", 6, "1 1 1 -1 -1 w w2", 4, 27),
    _row(12, "A2^2", 3, "1 1 1 w w2 w w2", 4, 55),
    _row(13, "A3xA1", 4, "1 1 1 i -1 -i -1", 4, 21),
    _row(14, "A3xA1", 4, "1 1 1 i -1 -i -1", 4, 22),
    _row(15, "A4", 5, "1 1 1 " + X5, 4, 54),
    _row(16, "D4", 6, "1 1 1 -1 -w2 -1 -w", 4, 19),
    _row(17, "D4(a1)", 4, "1 1 1 i -i i -i", 4, 50),
    _row(18, "A1^5", 2, "1 1 -1 -1 -1 -1 -1", 3, 3),
    _row(19, "A2xA1^3", 6, "1 1 -1 -1 -1 w w2", 3, 16),
    _row(20, "A2^2xA1", 6, "1 1 -1 w w2 w w2", 3, 45),
    _row(21, "A3xA1^2", 4, "1 1 i -1 -i -1 -1", 3, 13),
    _row(22, "A3xA1^2", 4, "1 1 i -1 -i -1 -1", 3, 14),
    _row(23, "A3xA2", 12, "1 1 i -1 -i w w2", 3, 42),
    _row(24, "A4xA1", 10, "1 1 " + X5 + " -1", 3, 43),
    _row(25, "A5", 6, "1 1 -w2 w -1 w2 -w", 3, 37),
    _row(26, "A5", 6, "1 1 -w2 w -1 w2 -w", 3, 38),
    _row(27, "D4xA1", 6, "1 1 -1 -w2 -1 -w -1", 3, 11),
    _row(28, "D4(a1)xA1", 4, "1 1 i -i i -i -1", 3, 35),
    _row(29, "D5", 8, "1 1 -1 " + X8, 3, 41),
    _row(30, "D5(a1)", 12, "1 1 i -i -w2 -1 -w", 3, 34),
    _row(31, "A1^6", 2, "1 -1 -1 -1 -1 -1 -1", 2, 2),
    _row(32, "A2^3", 3, "1 w w2 w w2 w w2", 2, 60),
    _row(33, "A3xA1^3", 4, "1 i -1 -i -1 -1 -1", 2, 8),
    _row(34, "A3xA2xA1", 12, "1 i -1 -i w w2 -1", 2, 30),
    _row(35, "A3^2", 4, "1 i -1 -i i -1 -i", 2, 28),
    _row(36, "A4xA2", 15, "1 " + X5 + " w w2", 2, 59),
    _row(37, "A5xA1", 6, "1 -w2 w -1 w2 -w -1", 2, 25),
    _row(38, "A5xA1", 6, "1 -w2 w -1 w2 -w -1", 2, 26),
    _row(39, "A6", 7, "1 x7^1 x7^2 x7^3 x7^4 x7^5 x7^6", 2, 57),
    _row(40, "D4xA1^2", 6, "1 -1 -w2 -1 -w -1 -1", 2, 7),
    _row(41, "D5xA1", 8, "1 -1 " + X8 + " -1", 2, 29),
    _row(42, "D5(a1)xA1", 12, "1 i -i -w2 -1 -w -1", 2, 23),
    _row(43, "D6", 10, "1 -1 -x5^3 -x5^4 -1 -x5^1 -x5^2", 2, 24),
    _row(44, "D6(a1)", 8, "1 i -i " + X8, 2, 52),
    _row(45, "D6(a2)", 6, "1 -w2 -1 -w -w2 -1 -w", 2, 20),
    _row(46, "E6", 12, "1 w w2 -iw -iw2 iw iw2", 2, 58),
    _row(47, "E6(a1)", 9, "1 x9^1 x9^2 x9^4 x9^5 x9^7 x9^8", 2, 56),
    _row(48, "E6(a2)", 6, "1 w w2 -w2 -w -w2 -w", 2, 51),
    _row(49, "A1^7", 2, "-1 -1 -1 -1 -1 -1 -1", 1, 1),
    # 特征值含 ±i，阶为 4
    _row(50, "A3^2xA1", 4, "-1 i -1 -i i -1 -i", 1, 17),
    _row(51, "A5xA2", 6, "w w2 -w2 w -1 w2 -w", 1, 48),
    _row(52, "A7", 8, "x8^1 i x8^3 -1 x8^5 -i x8^7", 1, 44),
    _row(53, "D4xA1^3", 6, "-1 -1 -1 -1 -w2 -1 -w", 1, 4),
    _row(54, "D6xA1", 10, "-1 -1 -1 -x5^3 -x5^4 -x5^1 -x5^2", 1, 15),
    _row(55, "D6(a2)xA1", 6, "-1 -w2 -1 -w -w2 -1 -w", 1, 12),
    # 七个特征值恰为 Φ18 的根，故第六项是 -ξ_9^2
    _row(56, "E7", 18, "-1 -x9^5 -x9^7 -x9^8 -x9^1 -x9^2 -x9^4", 1, 47),
    _row(57, "E7(a1)", 14, "-x7^4 -x7^5 -x7^6 -1 -x7^1 -x7^2 -x7^3", 1, 39),
    _row(58, "E7(a2)", 12, "-w2 -1 -w -iw -iw2 iw iw2", 1, 46),
    _row(59, "E7(a3)", 30, "-w2 -1 -w -x5^3 -x5^4 -x5^1 -x5^2", 1, 36),
    _row(60, "E7(a4)", 6, "-w2 -1 -w -w2 -w -w2 -w", 1, 32),
)

ROWS_BY_ID: Dict[int, CarterRow] = {row.class_id: row for row in CARTER_ROWS}

# 特征值数据完全相同的行对，对内顺序一律由 exc_cycle_type 的字典序决定；
# 这些行的 geiser 列只约束到对的层面
TIE_PAIRS: Tuple[Tuple[int, int], ...] = ((5, 6), (9, 10), (13, 14), (21, 22), (25, 26), (37, 38))
TIE_PARTNER_PAIRS: Dict[Tuple[int, int], Tuple[int, int]] = {
    (5, 6): (9, 10),
    (9, 10): (5, 6),
    (13, 14): (21, 22),
    (21, 22): (13, 14),
    (25, 26): (37, 38),
    (37, 38): (25, 26),
}
TIE_PAIR_OF: Dict[int, Tuple[int, int]] = {i: pair for pair in TIE_PAIRS for i in pair}

MINIMAL_CONIC_BUNDLE_IDS: FrozenSet[int] = frozenset({31, 35, 40, 43, 44, 45})
MINIMAL_PICARD_ONE_IDS: FrozenSet[int] = frozenset(range(49, 61))
MINIMAL_IDS: FrozenSet[int] = MINIMAL_CONIC_BUNDLE_IDS | MINIMAL_PICARD_ONE_IDS


def parse_eigen_token(token: str) -> Fraction:
    """把特征值记号解析为角度 θ ∈ [0,1)，特征值为 e^{2πiθ}"""
    rest = token
    angle = Fraction(0)
    if rest.startswith("-"):
        angle += Fraction(1, 2)
        rest = rest[1:]
    if rest.startswith("i"):
        angle += Fraction(1, 4)
        rest = rest[1:]
    if rest in ("", "1"):
        pass
    elif rest == "w":
        angle += Fraction(1, 3)
    elif rest == "w2":
        angle += Fraction(2, 3)
    elif rest.startswith("x"):
        try:
            base, power = rest[1:].split("^")
            angle += Fraction(int(power), int(base))
        except ValueError:
            raise InternalConsistencyError(f"无法解析特征值记号: {token}") from None
    else:
        raise InternalConsistencyError(f"无法解析特征值记号: {token}")
    return angle % 1


def eigen_pairs(tokens: Tuple[str, ...]) -> Tuple[Tuple[int, int], ...]:
    """记号列表 → 排序后的 (n, k)，表示本原 n 次单位根 e^{2πik/n}"""
    pairs = []
    for tok in tokens:
        angle = parse_eigen_token(tok)
        pairs.append((angle.denominator, angle.numerator))
    return tuple(sorted(pairs))


def cyclotomic_signature(tokens: Tuple[str, ...]) -> Tuple[Tuple[int, int], ...]:
    """记号列表 → K^⊥ 上的分圆签名 ((n, 重数), ...)

    Raises:
        InternalConsistencyError: 特征值不是若干完整分圆多项式的根集
    """
    counts: Dict[int, Dict[int, int]] = {}
    for n, k in eigen_pairs(tokens):
        counts.setdefault(n, {}).setdefault(k, 0)
        counts[n][k] += 1
    signature = []
    for n in sorted(counts):
        expected = [0] if n == 1 else [k for k in range(1, n) if gcd(k, n) == 1]
        mults = {counts[n].get(k, 0) for k in expected}
        if len(mults) != 1 or set(counts[n]) - set(expected):
            raise InternalConsistencyError(f"特征值 {tokens} 中 n={n} 的单位根不构成完整的 Φ_{n} 根集")
        signature.append((n, mults.pop()))
    return tuple(signature)


# ---------------------------------------------------------------------------
# 存在性结论（q 为素数幂）
# ---------------------------------------------------------------------------

class Verdict(str, Enum):
    EXISTS = "Exists"
    NOT_EXISTS = "NotExists"
    OPEN = "OpenInPaper"


def theorem_verdict(class_id: int, q: int) -> Tuple[Verdict, str]:
    """极小二次 del Pezzo 曲面类型在 F_q 上的存在性，返回 (结论, 出处条目)"""
    if class_id == 49:
        # F_2, F_3, F_4, F_5, F_7, F_8 上不存在
        return (Verdict.NOT_EXISTS if q in (2, 3, 4, 5, 7, 8) else Verdict.EXISTS), "(1)"
    if class_id == 31:
        # F_2, F_3, F_4 上不存在
        return (Verdict.NOT_EXISTS if q in (2, 3, 4) else Verdict.EXISTS), "(2)"
    if class_id in (40, 50, 53, 55, 60):
        # 仅 F_2 上不存在
        return (Verdict.NOT_EXISTS if q == 2 else Verdict.EXISTS), "(3)"
    if class_id in (43, 44, 45, 52, 54, 57, 59):
        # 对所有 q 存在
        return Verdict.EXISTS, "(4)"
    if class_id == 35:
        # F_2 上不存在，q ≥ 4 存在，F_3 未解决
        if q == 2:
            return Verdict.NOT_EXISTS, "(5)"
        return (Verdict.OPEN if q == 3 else Verdict.EXISTS), "(5)"
    if class_id in (51, 58):
        # q 为奇数时存在，偶数情形未给出
        return (Verdict.EXISTS if q % 2 else Verdict.OPEN), "(6)"
    if class_id == 56:
        # q ≡ 1 (mod 6) 时存在
        return (Verdict.EXISTS if q % 6 == 1 else Verdict.OPEN), "(7)"
    raise InternalConsistencyError(f"类型 {class_id} 不是极小类型，没有存在性结论")


@dataclass(frozen=True)
class TwistRecipe:
    """Geiser 扭变对应：极小类型 ↔ 平面在给定闭点模式处的爆破"""
    minimal_id: int
    twist_id: int
    pattern: str
    description: str


TWIST_RECIPES: Tuple[TwistRecipe, ...] = (
    TwistRecipe(49, 1, "1x7", "P² 在 7 个 F_q-点处爆破"),
    TwistRecipe(53, 4, "3,1x4", "P² 在一个 3 次点与 4 个 F_q-点处爆破"),
    TwistRecipe(55, 12, "3,3,1", "P² 在两个 3 次点与一个 F_q-点处爆破"),
    TwistRecipe(54, 15, "5,1x2", "P² 在一个 5 次点与两个 F_q-点处爆破"),
    TwistRecipe(57, 39, "7", "P² 在一个 7 次点处爆破"),
    TwistRecipe(59, 36, "5,3c", "两条有理二次曲线上分别取 5 次点与 3 次点爆破，再收缩第一条曲线的严格变换"),
)

RECIPES_BY_ID: Dict[int, TwistRecipe] = {r.minimal_id: r for r in TWIST_RECIPES}


def twist_recipe(class_id: int) -> Optional[TwistRecipe]:
    return RECIPES_BY_ID.get(class_id)


def conic_bundle_generators() -> List[Tuple[int, str]]:
    """ρ = 2 的六个极小类型及其 W(D6) 生成元（文本形式）"""
    return [
        (31, "i{1,2,3,4,5,6}"),
        (35, "i{1,2,3,5}(34)(56)"),
        (40, "i{1,2,3,4,5,6}(456)"),
        (43, "i{1,2,3,4,5,6}(23456)"),
        (44, "i{1,3}(12)(3456)"),
        (45, "i{1,2,3,4,5,6}(123)(456)"),
    ]
