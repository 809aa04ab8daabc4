"""zeta 函数与点数

对 F_q 上 Frobenius 作用为 M 的二次 del Pezzo 曲面：
    P(t) = det(I - qtM | Pic)，  Z(t) = 1 / ((1 - t) P(t) (1 - q²t))
    N_d = 1 + q^d·Tr(M^d) + q^{2d}
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import sympy

from src.core.exceptions import InvalidFieldError
from src.core.weyl import Isometry

logger = logging.getLogger(__name__)

_T = sympy.Symbol("t")


def prime_power(q: int) -> Tuple[int, int]:
    """q = p^e，返回 (p, e)

    Raises:
        InvalidFieldError: q 不是素数幂
    """
    if not isinstance(q, int) or q < 2:
        raise InvalidFieldError(f"q 必须是 ≥ 2 的素数幂: {q}")
    factors = sympy.factorint(q)
    if len(factors) != 1:
        raise InvalidFieldError(f"q = {q} 不是素数幂")
    (p, e), = factors.items()
    return int(p), int(e)


def poly_mul(a: List[int], b: List[int]) -> List[int]:
    """升幂系数列表相乘"""
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def char_poly_of(m: Isometry, q: int) -> List[int]:
    """P(t) = det(I - qtM)，升幂系数 c0..c8"""
    prime_power(q)
    coeffs = sympy.Matrix(m.matrix.tolist()).charpoly(_T).all_coeffs()
    # det(I - sM) = Σ_j a_{8-j} s^j，其中 det(xI - M) = Σ_k a_k x^k
    return [int(c) * q ** j for j, c in enumerate(coeffs)]


def traces(m: Isometry, dmax: int) -> List[int]:
    """Tr(M^d)，d = 1..dmax"""
    out = []
    power = np.eye(m.matrix.shape[0], dtype=np.int64)
    for _ in range(dmax):
        power = power @ m.matrix
        out.append(int(np.trace(power)))
    return out


@dataclass(frozen=True)
class ZetaFunction:
    """Z(t) = numerator / denominator，系数均为升幂整数列表"""
    numerator: Tuple[int, ...]
    denominator: Tuple[int, ...]

    def __str__(self) -> str:
        den = sympy.Poly(list(reversed(self.denominator)), _T).as_expr()
        return f"1/({sympy.factor(den)})"


@dataclass(frozen=True)
class PointCounts:
    counts: Tuple[int, ...]
    negative_at: Optional[int]


def zeta_of(m: Isometry, q: int) -> ZetaFunction:
    p_t = char_poly_of(m, q)
    den = poly_mul(poly_mul([1, -1], p_t), [1, -q * q])
    return ZetaFunction(numerator=(1,), denominator=tuple(den))


def counts_of(m: Isometry, q: int, dmax: int) -> PointCounts:
    if dmax < 1:
        raise ValueError(f"dmax 必须 ≥ 1: {dmax}")
    prime_power(q)
    counts = tuple(1 + q ** d * tr + q ** (2 * d) for d, tr in enumerate(traces(m, dmax), start=1))
    negative_at = next((d for d, n in enumerate(counts, start=1) if n < 0), None)
    return PointCounts(counts=counts, negative_at=negative_at)


def counts_from_zeta(zeta: ZetaFunction, dmax: int) -> List[int]:
    """从 log Z 的展开读出 N_d：Σ N_d t^d = -t D'(t) / D(t)，D 为分母，D(0) = 1"""
    den = list(zeta.denominator) + [0] * max(0, dmax + 1 - len(zeta.denominator))
    if den[0] != 1:
        raise ValueError("zeta 分母的常数项必须为 1")
    s = [0] * (dmax + 1)
    for n in range(1, dmax + 1):
        s[n] = -n * den[n] - sum(den[j] * s[n - j] for j in range(1, n + 1))
    return s[1:]


def roots_on_circle(p_coeffs: List[int], q: int) -> bool:
    """P(t/q) 是否为 ± 分圆多项式之积（即 P 的所有根模长为 1/q）"""
    scaled = [c // q ** j for j, c in enumerate(p_coeffs)]
    if any(c * q ** j != orig for j, (c, orig) in enumerate(zip(scaled, p_coeffs))):
        return False
    poly = sympy.Poly(list(reversed(scaled)), _T)
    _, factors = sympy.factor_list(poly.as_expr(), _T)
    for factor, _mult in factors:
        f = sympy.Poly(factor, _T)
        n_candidates = [n for n in range(1, 31) if sympy.totient(n) == f.degree()]
        if not any(f == sympy.Poly(sympy.cyclotomic_poly(n, _T), _T)
                   or f == -sympy.Poly(sympy.cyclotomic_poly(n, _T), _T) for n in n_candidates):
            return False
    return True


# ---------------------------------------------------------------------------
# 以类编号为参数的接口
# ---------------------------------------------------------------------------

def _representative(class_id: int) -> Isometry:
    from src.services.class_table import get_class_table
    return get_class_table().record(class_id).representative


def frobenius_char_poly(class_id: int, q: int) -> List[int]:
    """类 class_id 的 P(t) 系数 c0..c8"""
    return char_poly_of(_representative(class_id), q)


def zeta_function(class_id: int, q: int) -> ZetaFunction:
    return zeta_of(_representative(class_id), q)


def point_counts(class_id: int, q: int, dmax: int) -> PointCounts:
    return counts_of(_representative(class_id), q, dmax)
