"""二次 del Pezzo 曲面的 Picard 格 Pic(X̄)

基底为 (L, E1, ..., E7)：平面在 7 个点处爆破，L 为直线的拉回，E_i 为例外曲线。
相交形式在该基底下为对角形式 (+1, -1, ..., -1)。
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from src.core.exceptions import MalformedClassError

RANK = 8
BASIS_NAMES = ("L", "E1", "E2", "E3", "E4", "E5", "E6", "E7")

# 相交形式的 Gram 矩阵
GRAM = np.diag([1, -1, -1, -1, -1, -1, -1, -1]).astype(np.int64)

# 例外类 / 根的穷举搜索窗口
DEGREE_BOUND = 3
MULTIPLICITY_BOUND = 2


@dataclass(frozen=True)
class DivisorClass:
    """Pic(X̄) 中的整系数类，coeffs = (d; m1..m7)，代表 d·L + Σ m_i·E_i"""
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != RANK:
            raise MalformedClassError(f"除子类需要 {RANK} 个系数，收到 {len(self.coeffs)} 个")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @classmethod
    def of(cls, values: Iterable[int]) -> "DivisorClass":
        return cls(tuple(values))

    @classmethod
    def line(cls) -> "DivisorClass":
        return cls((1, 0, 0, 0, 0, 0, 0, 0))

    @classmethod
    def exceptional(cls, i: int) -> "DivisorClass":
        """E_i，i 取 1..7"""
        if not 1 <= i <= 7:
            raise MalformedClassError(f"E_i 的下标必须在 1..7 之间: {i}")
        c = [0] * RANK
        c[i] = 1
        return cls(tuple(c))

    def dot(self, other: "DivisorClass") -> int:
        d = self.coeffs[0] * other.coeffs[0]
        return d - sum(a * b for a, b in zip(self.coeffs[1:], other.coeffs[1:]))

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(tuple(-a for a in self.coeffs))

    def __rmul__(self, k: int) -> "DivisorClass":
        return DivisorClass(tuple(k * a for a in self.coeffs))

    def as_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64)

    def to_json(self) -> List[int]:
        return list(self.coeffs)

    def __str__(self) -> str:
        d, *m = self.coeffs
        return f"({d}; {','.join(str(x) for x in m)})"


# 典范类 K = -3L + ΣE_i
K = DivisorClass((-3, 1, 1, 1, 1, 1, 1, 1))
K_ARRAY = K.as_array()


def intersect(a: DivisorClass, b: DivisorClass) -> int:
    """相交数 a·b"""
    return a.dot(b)


def _window() -> np.ndarray:
    """系数窗口 |d| ≤ 3, |m_i| ≤ 2 内的全部整向量，形状 (N, 8)"""
    d_range = np.arange(-DEGREE_BOUND, DEGREE_BOUND + 1)
    m_range = np.arange(-MULTIPLICITY_BOUND, MULTIPLICITY_BOUND + 1)
    grids = np.meshgrid(d_range, *([m_range] * 7), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)


def _filter_window(self_int: int, k_int: int) -> np.ndarray:
    vecs = _window()
    squares = vecs[:, 0] ** 2 - (vecs[:, 1:] ** 2).sum(axis=1)
    with_k = vecs @ GRAM @ K_ARRAY
    hits = vecs[(squares == self_int) & (with_k == k_int)]
    # 按系数字典序排序（lexsort 以最后一个键为主键）
    order = np.lexsort(hits.T[::-1])
    return hits[order]


@lru_cache(maxsize=1)
def exceptional_matrix() -> np.ndarray:
    """56 个例外类组成的 (56, 8) 矩阵，按字典序排列"""
    mat = _filter_window(-1, -1)
    mat.setflags(write=False)
    return mat


@lru_cache(maxsize=1)
def root_matrix() -> np.ndarray:
    """E7 根系的 126 个根组成的 (126, 8) 矩阵，按字典序排列"""
    mat = _filter_window(-2, 0)
    mat.setflags(write=False)
    return mat


def exceptional_classes() -> Tuple[DivisorClass, ...]:
    """全部例外类：v·v = -1 且 v·K = -1"""
    return tuple(DivisorClass(tuple(row)) for row in exceptional_matrix())


def roots() -> Tuple[DivisorClass, ...]:
    """全部根：v·v = -2 且 v·K = 0"""
    return tuple(DivisorClass(tuple(row)) for row in root_matrix())


def arithmetic_genus(c: DivisorClass) -> int:
    """由伴随公式 2p_a - 2 = C·(C + K) 计算算术亏格

    负值由调用方解释为可约性证据。

    Raises:
        MalformedClassError: C·C + C·K 为奇数
    """
    total = c.dot(c) + c.dot(K)
    if total % 2:
        raise MalformedClassError(f"{c} 不满足伴随公式：C·C + C·K = {total} 为奇数")
    return 1 + total // 2


def geiser_image(v: DivisorClass) -> DivisorClass:
    """Geiser 对合：v ↦ (v·K)K - v，固定 K，在 K^⊥ 上取负"""
    return v.dot(K) * K - v


def geiser_matrix() -> np.ndarray:
    """Geiser 中心元的 8×8 矩阵（作用于列向量）"""
    # (v·K)K = K Kᵀ G v
    return np.outer(K_ARRAY, K_ARRAY) @ GRAM - np.eye(RANK, dtype=np.int64)


def gram_products(vectors: Sequence[DivisorClass]) -> np.ndarray:
    """一组类两两相交数构成的矩阵"""
    mat = np.array([v.coeffs for v in vectors], dtype=np.int64)
    return mat @ GRAM @ mat.T
