"""W(E7) 群引擎

Pic(X̄) 的保 K 等距恰为 W(E7)。每个群元素由 E1..E7 的像（均为例外类）唯一确定，
L 的像可由 3L = -K + ΣE_i 恢复。因此元素编码为一个 int64：

    code = Σ_i idx(M·E_i) · 56^i,   idx 为例外类在字典序列表中的下标

群的 BFS 闭包、共轭类轨道搜索都在 numpy 向量化的 code 数组上完成。
"""
import logging
from dataclasses import dataclass
from functools import lru_cache, reduce
from math import gcd
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from tqdm import tqdm

from src.config.settings import Config, Settings
from src.core.exceptions import BudgetExceededError, InternalConsistencyError, NotAnIsometryError
from src.core.picard import GRAM, K_ARRAY, RANK, DivisorClass, exceptional_matrix, geiser_matrix, root_matrix

logger = logging.getLogger(__name__)

GROUP_ORDER = 2_903_040
CLASS_COUNT = 60
ENTRY_BOUND = 32

N_EXC = 56
_KEY_BASE = 7
_KEY_SHIFT = 3
_POW_KEY = _KEY_BASE ** np.arange(RANK, dtype=np.int64)
_POW_CODE = N_EXC ** np.arange(7, dtype=np.int64)

# 处理前沿时每批元素数，控制峰值内存
CHUNK = 1 << 16

# 特征多项式中可能出现的分圆多项式指标：φ(n) ≤ 8
CYCLOTOMIC_INDICES = tuple(n for n in range(1, 31) if sympy.totient(n) <= 8)


# ---------------------------------------------------------------------------
# 等距
# ---------------------------------------------------------------------------

class Isometry:
    """Pic(X̄) 上的 8×8 整数矩阵，作用于列向量（系数向量）"""

    __slots__ = ("matrix",)

    def __init__(self, matrix, check: bool = True):
        mat = np.array(matrix, dtype=np.int64)
        if mat.shape != (RANK, RANK):
            raise NotAnIsometryError(f"等距矩阵必须是 8×8，收到 {mat.shape}")
        mat.setflags(write=False)
        self.matrix = mat
        if check:
            self.validate()

    def validate(self) -> "Isometry":
        """检查：保相交形式、固定 K、系数有界

        Raises:
            NotAnIsometryError: 任一条件不满足
        """
        m = self.matrix
        if np.abs(m).max() > ENTRY_BOUND:
            raise NotAnIsometryError(f"矩阵元素超出界 {ENTRY_BOUND}")
        if not np.array_equal(m.T @ GRAM @ m, GRAM):
            raise NotAnIsometryError("矩阵不保持相交形式 MᵀGM = G")
        if not np.array_equal(m @ K_ARRAY, K_ARRAY):
            raise NotAnIsometryError("矩阵不固定典范类 K")
        return self

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(np.eye(RANK, dtype=np.int64), check=False)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry(self.matrix @ other.matrix, check=False)

    def power(self, k: int) -> "Isometry":
        return Isometry(np.linalg.matrix_power(self.matrix, k), check=False)

    def apply(self, v: DivisorClass) -> DivisorClass:
        return DivisorClass(tuple(int(x) for x in self.matrix @ v.as_array()))

    def __eq__(self, other) -> bool:
        return isinstance(other, Isometry) and np.array_equal(self.matrix, other.matrix)

    def __hash__(self) -> int:
        return hash(self.matrix.tobytes())

    def to_json(self) -> List[List[int]]:
        return self.matrix.tolist()

    def __repr__(self) -> str:
        return f"Isometry({self.matrix.tolist()})"


def geiser_element() -> Isometry:
    """中心元 v ↦ (v·K)K - v"""
    return Isometry(geiser_matrix(), check=False)


# ---------------------------------------------------------------------------
# 单纯根与反射
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def simple_roots() -> Tuple[DivisorClass, ...]:
    """K^⊥ 中的一组单纯根：E_i - E_{i+1} (i=1..6) 与 L - E1 - E2 - E3"""
    roots = []
    for i in range(1, 7):
        roots.append(DivisorClass.exceptional(i) - DivisorClass.exceptional(i + 1))
    roots.append(DivisorClass.line() - DivisorClass.exceptional(1)
                 - DivisorClass.exceptional(2) - DivisorClass.exceptional(3))
    return tuple(roots)


def reflection_matrix(alpha: DivisorClass) -> np.ndarray:
    """s_α(v) = v + (v·α)α 的矩阵"""
    a = alpha.as_array()
    return np.eye(RANK, dtype=np.int64) + np.outer(a, a @ GRAM)


def simple_reflections() -> List[Isometry]:
    """7 个单纯反射"""
    return [Isometry(reflection_matrix(a)) for a in simple_roots()]


# ---------------------------------------------------------------------------
# 编码
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def _exceptional_lookup() -> np.ndarray:
    """例外类向量键值 → 下标的查找表，非例外类为 -1"""
    table = np.full(_KEY_BASE ** RANK, -1, dtype=np.int16)
    exc = exceptional_matrix()
    table[(exc + _KEY_SHIFT) @ _POW_KEY] = np.arange(N_EXC, dtype=np.int16)
    return table


def _vector_keys(vectors: np.ndarray) -> np.ndarray:
    shifted = vectors.astype(np.int64) + _KEY_SHIFT
    in_window = ((shifted >= 0) & (shifted < _KEY_BASE)).all(axis=-1)
    return np.where(in_window, np.clip(shifted, 0, _KEY_BASE - 1) @ _POW_KEY, -1)


def exceptional_indices(vectors: np.ndarray) -> np.ndarray:
    """把形状 (..., 8) 的向量映射为例外类下标，非例外类给 -1"""
    keys = _vector_keys(vectors)
    out = np.full(keys.shape, -1, dtype=np.int64)
    valid = keys >= 0
    out[valid] = _exceptional_lookup()[keys[valid]]
    return out


def encode_columns(cols: np.ndarray) -> np.ndarray:
    """cols 形状 (n, 7, 8)：E1..E7 的像 → int64 code

    Raises:
        NotAnIsometryError: 某个像不是例外类
    """
    idx = exceptional_indices(cols)
    if (idx < 0).any():
        raise NotAnIsometryError("E_i 的像不是例外类，矩阵不在 W(E7) 中")
    return idx @ _POW_CODE


def decode_columns(codes: np.ndarray) -> np.ndarray:
    """code → E1..E7 的像，形状 (n, 7, 8)，int16"""
    digits = (np.asarray(codes, dtype=np.int64)[:, None] // _POW_CODE) % N_EXC
    return exceptional_matrix().astype(np.int16)[digits]


def decode_matrices(codes: np.ndarray) -> np.ndarray:
    """code → 完整矩阵，形状 (n, 8, 8)，int64"""
    cols = decode_columns(codes).astype(np.int64)
    l_col = (cols.sum(axis=1) - K_ARRAY) // 3
    return np.concatenate([l_col[:, None, :], cols], axis=1).transpose(0, 2, 1)


def encode_matrices(mats: np.ndarray) -> np.ndarray:
    return encode_columns(np.asarray(mats)[:, :, 1:].transpose(0, 2, 1))


def encode(m: Isometry) -> int:
    return int(encode_matrices(m.matrix[None])[0])


def decode(code: int) -> Isometry:
    return Isometry(decode_matrices(np.array([code]))[0], check=False)


def _left_reflect(cols: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    # s_α(c) = c + (c·α)α，对每一列
    dots = cols @ (GRAM @ alpha).astype(cols.dtype)
    return cols + dots[..., None] * alpha.astype(cols.dtype)


def _conjugate(mats: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    # s M s，其中 s = I + α αᵀG
    w = GRAM @ alpha
    ms = mats + (mats @ alpha)[:, :, None] * w[None, None, :]
    return ms + alpha[None, :, None] * np.einsum("k,nkj->nj", w, ms)[:, None, :]


# ---------------------------------------------------------------------------
# 群存储
# ---------------------------------------------------------------------------

def estimate_store_bytes(order: int = GROUP_ORDER) -> int:
    """群存储的内存估计：BFS 序 code、排序 code、排序索引、类标签、查找表与批处理工作区"""
    per_element = 8 + 8 + 4 + 1
    working = CHUNK * 7 * (7 * 8 * 2 + 8) * 3
    return order * per_element + _KEY_BASE ** RANK * 2 + working


class GroupStore:
    """W(E7) 全体元素：BFS 顺序（层内按 code 升序）加排序索引，支持成员查询与迭代"""

    def __init__(self, codes_bfs: np.ndarray, layer_sizes: Sequence[int]):
        self.codes_bfs = np.asarray(codes_bfs, dtype=np.int64)
        self.layer_sizes = list(layer_sizes)
        self.sort_index = np.argsort(self.codes_bfs, kind="stable").astype(np.int32)
        self.sorted_codes = self.codes_bfs[self.sort_index]

    def __len__(self) -> int:
        return int(self.codes_bfs.size)

    @property
    def count(self) -> int:
        return len(self)

    def positions(self, codes: np.ndarray) -> np.ndarray:
        """code → BFS 位置，不在群中为 -1"""
        codes = np.asarray(codes, dtype=np.int64)
        idx = np.searchsorted(self.sorted_codes, codes)
        idx = np.minimum(idx, self.sorted_codes.size - 1)
        found = self.sorted_codes[idx] == codes
        return np.where(found, self.sort_index[idx], -1)

    def __contains__(self, item) -> bool:
        if isinstance(item, Isometry):
            try:
                item = encode(item)
            except NotAnIsometryError:
                return False
        return bool(self.positions(np.array([item]))[0] >= 0)

    def iter_codes(self, batch: int = CHUNK) -> Iterator[np.ndarray]:
        for start in range(0, len(self), batch):
            yield self.codes_bfs[start:start + batch]

    def __iter__(self) -> Iterator[Isometry]:
        for block in self.iter_codes():
            for mat in decode_matrices(block):
                yield Isometry(mat, check=False)

    def nbytes(self) -> int:
        return self.codes_bfs.nbytes + self.sorted_codes.nbytes + self.sort_index.nbytes


def _closure_step(frontier: np.ndarray, alphas: Sequence[np.ndarray]) -> np.ndarray:
    candidates = []
    for start in range(0, frontier.size, CHUNK):
        cols = decode_columns(frontier[start:start + CHUNK])
        for a in alphas:
            candidates.append(encode_columns(_left_reflect(cols, a)))
    return np.unique(np.concatenate(candidates)) if candidates else frontier[:0]


def enumerate_group(memory_budget: Optional[int] = None, show_progress: Optional[bool] = None) -> GroupStore:
    """单纯反射生成的闭包：BFS 逐层左乘单纯反射

    Args:
        memory_budget: 内存预算（字节），默认 Config.MEMORY_BUDGET
        show_progress: 是否显示 tqdm 进度条

    Returns:
        GroupStore，元素个数必为 2,903,040

    Raises:
        BudgetExceededError: 预算不足，附带进度报告
    """
    budget = Config.MEMORY_BUDGET if memory_budget is None else memory_budget
    show = Settings.SHOW_PROGRESS if show_progress is None else show_progress
    estimate = estimate_store_bytes()
    if budget < estimate:
        raise BudgetExceededError(
            f"内存预算 {budget} 字节不足，群存储预计需要 {estimate} 字节",
            progress={"layers": 0, "elements": 0, "estimated_bytes": estimate},
        )

    alphas = [a.as_array().astype(np.int16) for a in simple_roots()]
    identity = np.array([encode(Isometry.identity())], dtype=np.int64)
    seen = identity.copy()
    layers = [identity]
    frontier = identity

    with tqdm(total=GROUP_ORDER, desc="W(E7) BFS", unit="elt", disable=not show) as bar:
        bar.update(1)
        while frontier.size:
            new = np.setdiff1d(_closure_step(frontier, alphas), seen, assume_unique=True)
            if new.size == 0:
                break
            seen = np.union1d(seen, new)
            layers.append(new)
            frontier = new
            bar.update(new.size)
            used = 2 * seen.nbytes + _KEY_BASE ** RANK * 2
            if used > budget:
                raise BudgetExceededError(
                    f"群枚举在第 {len(layers) - 1} 层超出内存预算",
                    progress={"layers": len(layers) - 1, "elements": int(seen.size), "used_bytes": int(used)},
                )
            logger.debug(f"BFS 第 {len(layers) - 1} 层: {new.size} 个元素，累计 {seen.size}")

    store = GroupStore(np.concatenate(layers), [layer.size for layer in layers])
    logger.info(f"W(E7) 枚举完成: {len(store)} 个元素，{len(layers)} 层（最长字长 {len(layers) - 1}）")
    if len(store) != GROUP_ORDER:
        raise InternalConsistencyError(f"群阶 {len(store)} 与 W(E7) 的阶 {GROUP_ORDER} 不符")
    return store


# ---------------------------------------------------------------------------
# 共轭类
# ---------------------------------------------------------------------------

@dataclass
class ClassPartition:
    """共轭类划分：labels 与 BFS 顺序对齐，类按首次出现的 BFS 位置编号"""
    labels: np.ndarray
    representatives: List[int]
    sizes: List[int]


def conjugacy_orbit(code: int, alphas: Optional[Sequence[np.ndarray]] = None) -> np.ndarray:
    """x 在单纯反射共轭下的轨道（即 x 的共轭类），返回排序后的 code 数组"""
    if alphas is None:
        alphas = [a.as_array() for a in simple_roots()]
    members = np.array([code], dtype=np.int64)
    frontier = members
    while frontier.size:
        candidates = []
        for start in range(0, frontier.size, CHUNK):
            mats = decode_matrices(frontier[start:start + CHUNK])
            for a in alphas:
                candidates.append(encode_matrices(_conjugate(mats, a)))
        new = np.setdiff1d(np.unique(np.concatenate(candidates)), members, assume_unique=True)
        members = np.union1d(members, new)
        frontier = new
    return members


def label_conjugacy_classes(store: GroupStore, show_progress: Optional[bool] = None) -> ClassPartition:
    """按 BFS 顺序取第一个未标记元素，搜索其共轭轨道，直至全部标记"""
    show = Settings.SHOW_PROGRESS if show_progress is None else show_progress
    alphas = [a.as_array() for a in simple_roots()]
    labels = np.full(len(store), -1, dtype=np.int16)
    reps: List[int] = []
    sizes: List[int] = []
    cursor = 0
    with tqdm(total=len(store), desc="共轭类", unit="elt", disable=not show) as bar:
        while True:
            unlabeled = np.flatnonzero(labels[cursor:] < 0)
            if unlabeled.size == 0:
                break
            cursor += int(unlabeled[0])
            rep = int(store.codes_bfs[cursor])
            orbit = conjugacy_orbit(rep, alphas)
            pos = store.positions(orbit)
            if (pos < 0).any():
                raise InternalConsistencyError("共轭轨道中出现不属于群存储的元素")
            labels[pos] = len(reps)
            reps.append(rep)
            sizes.append(int(orbit.size))
            bar.update(orbit.size)
    logger.info(f"共轭类标记完成: {len(reps)} 个类")
    if sum(sizes) != len(store):
        raise InternalConsistencyError("共轭类大小之和不等于群阶")
    return ClassPartition(labels=labels, representatives=reps, sizes=sizes)


def cyclic_subgroup_classes(partition: ClassPartition, store: GroupStore) -> int:
    """循环子群的共轭类个数：x 与 x^k (gcd(k, ord x) = 1) 生成同一循环子群，用并查集合并"""
    parent = list(range(len(partition.representatives)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for cls, rep in enumerate(partition.representatives):
        x = decode(rep)
        n = element_order(x)
        for k in range(2, n):
            if gcd(k, n) != 1:
                continue
            pos = store.positions(np.array([encode(x.power(k))]))[0]
            other = int(partition.labels[pos])
            a, b = find(cls), find(other)
            if a != b:
                parent[max(a, b)] = min(a, b)
    return len({find(i) for i in range(len(parent))})


# ---------------------------------------------------------------------------
# 不变量
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassFingerprint:
    """共轭不变的指纹"""
    charpoly_cyclotomic: Tuple[Tuple[int, int], ...]
    exc_cycle_type: Tuple[int, ...]
    root_cycle_type: Tuple[int, ...]

    def __post_init__(self):
        degree = sum(int(sympy.totient(n)) * mult for n, mult in self.charpoly_cyclotomic)
        if degree != RANK:
            raise InternalConsistencyError(f"分圆分解次数之和为 {degree}，应为 {RANK}")
        if sum(self.exc_cycle_type) != N_EXC or sum(self.root_cycle_type) != 126:
            raise InternalConsistencyError("轮换型之和与例外类/根的个数不符")

    def key(self) -> str:
        cyc = ".".join(f"{n}^{m}" for n, m in self.charpoly_cyclotomic)
        return f"{cyc}|{','.join(map(str, self.exc_cycle_type))}|{','.join(map(str, self.root_cycle_type))}"


def cyclotomic_factorization(mat: np.ndarray) -> Tuple[Tuple[int, int], ...]:
    """det(tI - M) 分解为分圆多项式 Φ_n 的幂，返回 ((n, 重数), ...)，按 n 升序"""
    t = sympy.Symbol("t")
    poly = sympy.Poly(sympy.Matrix(mat.tolist()).charpoly(t).as_expr(), t)
    result = []
    for n in CYCLOTOMIC_INDICES:
        phi = sympy.Poly(sympy.cyclotomic_poly(n, t), t)
        mult = 0
        while poly.degree() >= phi.degree():
            quotient, remainder = poly.div(phi)
            if not remainder.is_zero:
                break
            poly = quotient
            mult += 1
        if mult:
            result.append((n, mult))
    if poly.degree() != 0:
        raise NotAnIsometryError("特征多项式不是分圆多项式之积，矩阵不是有限阶等距")
    return tuple(result)


def _cycle_type(perm: np.ndarray) -> Tuple[int, ...]:
    seen = np.zeros(perm.size, dtype=bool)
    lengths = []
    for start in range(perm.size):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


@lru_cache(maxsize=1)
def _root_lookup() -> Dict[Tuple[int, ...], int]:
    return {tuple(int(x) for x in r): i for i, r in enumerate(root_matrix())}


def exceptional_permutation(m: Isometry) -> np.ndarray:
    """m 在 56 个例外类上诱导的置换：perm[i] = idx(m·e_i)"""
    images = exceptional_matrix() @ m.matrix.T
    perm = exceptional_indices(images)
    if (perm < 0).any():
        raise NotAnIsometryError("矩阵没有把例外类映为例外类")
    return perm


def root_permutation(m: Isometry) -> np.ndarray:
    lookup = _root_lookup()
    images = root_matrix() @ m.matrix.T
    try:
        return np.array([lookup[tuple(int(x) for x in row)] for row in images], dtype=np.int64)
    except KeyError:
        raise NotAnIsometryError("矩阵没有把根映为根") from None


def fingerprint(m: Isometry) -> ClassFingerprint:
    return ClassFingerprint(
        charpoly_cyclotomic=cyclotomic_factorization(m.matrix),
        exc_cycle_type=_cycle_type(exceptional_permutation(m)),
        root_cycle_type=_cycle_type(root_permutation(m)),
    )


def element_order(m: Isometry) -> int:
    """元素的阶 = 特征多项式中分圆指标的最小公倍数"""
    indices = [n for n, _ in cyclotomic_factorization(m.matrix)]
    return reduce(lambda a, b: a * b // gcd(a, b), indices, 1)


def perp_signature(cyclotomic: Sequence[Tuple[int, int]]) -> Tuple[Tuple[int, int], ...]:
    """去掉 K 方向的特征值 1，得到 K^⊥ 上的分圆签名"""
    out = []
    for n, mult in cyclotomic:
        if n == 1:
            mult -= 1
        if mult:
            out.append((n, mult))
    return tuple(out)


def eigenvalues_from_cyclotomic(signature: Sequence[Tuple[int, int]]) -> Tuple[Tuple[int, int], ...]:
    """分圆签名展开为特征值 (n, k)，表示 e^{2πik/n}，k 与 n 互素"""
    eigen = []
    for n, mult in signature:
        ks = [0] if n == 1 else [k for k in range(1, n) if gcd(k, n) == 1]
        for _ in range(mult):
            eigen.extend((n, k) for k in ks)
    return tuple(sorted(eigen))


def invariant_picard_rank(m: Isometry) -> int:
    """⟨m⟩ 不变子格的秩 = m 在 Pic 上特征值 1 的重数"""
    for n, mult in cyclotomic_factorization(m.matrix):
        if n == 1:
            return mult
    raise InternalConsistencyError("等距必须固定 K，特征值 1 的重数至少为 1")


def exceptional_orbits(m: Isometry) -> List[List[DivisorClass]]:
    """⟨m⟩ 在 56 个例外类上的轨道划分；轨道按最小下标排序，轨道内沿 m 的作用排列"""
    perm = exceptional_permutation(m)
    exc = exceptional_matrix()
    seen = np.zeros(N_EXC, dtype=bool)
    orbits = []
    for start in range(N_EXC):
        if seen[start]:
            continue
        orbit = []
        j = start
        while not seen[j]:
            seen[j] = True
            orbit.append(DivisorClass(tuple(int(x) for x in exc[j])))
            j = perm[j]
        orbits.append(orbit)
    return orbits


def has_contractible_orbit(m: Isometry) -> bool:
    """是否存在两两正交的例外类轨道（可同时收缩）"""
    for orbit in exceptional_orbits(m):
        mat = np.array([c.coeffs for c in orbit], dtype=np.int64)
        products = mat @ GRAM @ mat.T
        off_diagonal = products - np.diag(np.diag(products))
        if not off_diagonal.any():
            return True
    return False
