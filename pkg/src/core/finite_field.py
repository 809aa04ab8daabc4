"""有限域 F_{p^m} 的算术上下文

元素编码为整数：F_p 上次数 < m 的剩余多项式，其 p 进制各位（低位在前）就是多项式系数。
模多项式取首一不可约多项式中系数（从高到低读）字典序最小者。
规模不超过上限的域预先建立 exp/log 表；更大的域直接做多项式运算。
"""
import itertools
import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

import sympy
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_gcdex, gf_irreducible_p, gf_mul, gf_pow_mod, gf_rem

from src.config.settings import Config
from src.core.exceptions import InvalidFieldError, SizeCapError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def canonical_modulus(p: int, m: int) -> Tuple[int, ...]:
    """字典序最小的 m 次首一不可约多项式，系数从高到低"""
    if not sympy.isprime(p):
        raise InvalidFieldError(f"特征 p = {p} 不是素数")
    if m < 1:
        raise InvalidFieldError(f"扩张次数必须 ≥ 1: {m}")
    for tail in itertools.product(range(p), repeat=m):
        f = [1, *tail]
        if gf_irreducible_p(f, p, ZZ):
            return tuple(f)
    raise InvalidFieldError(f"找不到 F_{p} 上的 {m} 次不可约多项式")


@dataclass(frozen=True)
class FieldSpec:
    """F_{p^m} 的描述"""
    p: int
    m: int
    modulus: Tuple[int, ...]

    def __post_init__(self):
        if not sympy.isprime(self.p):
            raise InvalidFieldError(f"特征 p = {self.p} 不是素数")
        if len(self.modulus) != self.m + 1 or self.modulus[0] != 1:
            raise InvalidFieldError(f"模多项式必须是 {self.m} 次首一多项式: {self.modulus}")
        if not gf_irreducible_p(list(self.modulus), self.p, ZZ):
            raise InvalidFieldError(f"模多项式 {self.modulus} 在 F_{self.p} 上可约")

    @classmethod
    def canonical(cls, p: int, m: int) -> "FieldSpec":
        return cls(p, m, canonical_modulus(p, m))

    @property
    def size(self) -> int:
        return self.p ** self.m


class FiniteField:
    """F_{p^m} 的算术上下文，构造后只读，可在线程间共享"""

    def __init__(self, spec: FieldSpec, cap: Optional[int] = None):
        self.spec = spec
        self.p = spec.p
        self.m = spec.m
        self.size = spec.size
        self.cap = Config.FIELD_SIZE_CAP if cap is None else cap
        self._modulus = list(spec.modulus)
        self._digit_pows = [self.p ** i for i in range(self.m)]
        self._exp: Optional[List[int]] = None
        self._log: Optional[List[int]] = None
        self._primitive: Optional[int] = None
        if self.m > 1 and self.size <= self.cap:
            self._build_tables()

    @classmethod
    def of(cls, p: int, m: int = 1, cap: Optional[int] = None) -> "FiniteField":
        return _cached_field(p, m, cap)

    # ------------------------------------------------------------ 编码
    def to_poly(self, a: int) -> List[int]:
        """整数 → galoistools 系数列表（高次在前，无前导零）"""
        digits = []
        while a:
            a, r = divmod(a, self.p)
            digits.append(r)
        return digits[::-1]

    def from_poly(self, f: Sequence[int]) -> int:
        value = 0
        for c in f:
            value = value * self.p + int(c) % self.p
        return value

    def coefficients(self, a: int) -> List[int]:
        """低次在前、长度为 m 的系数列表"""
        digits = []
        for _ in range(self.m):
            a, r = divmod(a, self.p)
            digits.append(r)
        return digits

    def from_coefficients(self, coeffs: Sequence[int]) -> int:
        return sum((int(c) % self.p) * w for c, w in zip(coeffs, self._digit_pows))

    # ------------------------------------------------------------ 运算
    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        out, w = 0, 1
        for _ in range(self.m):
            a, ra = divmod(a, self.p)
            b, rb = divmod(b, self.p)
            out += ((ra + rb) % self.p) * w
            w *= self.p
        return out

    def neg(self, a: int) -> int:
        if self.m == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        out, w = 0, 1
        for _ in range(self.m):
            a, r = divmod(a, self.p)
            out += ((-r) % self.p) * w
            w *= self.p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.m == 1:
            return (a * b) % self.p
        if self._log is not None:
            return self._exp[(self._log[a] + self._log[b]) % (self.size - 1)]
        return self._poly_mul(a, b)

    def _poly_mul(self, a: int, b: int) -> int:
        prod = gf_mul(self.to_poly(a), self.to_poly(b), self.p, ZZ)
        return self.from_poly(gf_rem(prod, self._modulus, self.p, ZZ))

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("有限域中 0 没有逆元")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        if self._log is not None:
            return self._exp[(-self._log[a]) % (self.size - 1)]
        return self.from_poly(gf_gcdex(self.to_poly(a), self._modulus, self.p, ZZ)[0])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n == 0:
            return 1
        if a == 0:
            return 0
        if n < 0:
            a, n = self.inv(a), -n
        if self.m == 1:
            return pow(a, n, self.p)
        if self._log is not None:
            return self._exp[(self._log[a] * n) % (self.size - 1)]
        return self.from_poly(gf_pow_mod(self.to_poly(a), n, self._modulus, self.p, ZZ))

    def frobenius(self, a: int, e: int = 1) -> int:
        """x ↦ x^{p^e}"""
        return self.pow(a, self.p ** e)

    def scalar(self, c: int) -> int:
        """整数 c 在素域中的像"""
        return c % self.p

    def sum(self, values) -> int:
        total = 0
        for v in values:
            total = self.add(total, v)
        return total

    # ------------------------------------------------------------ 结构
    def _is_primitive(self, g: int) -> bool:
        order = self.size - 1
        for r in sympy.factorint(order):
            if self.pow(g, order // r) == 1:
                return False
        return True

    def primitive_element(self) -> int:
        """整数编码最小的本原元"""
        if self._primitive is None:
            if self.size == 2:
                self._primitive = 1
            else:
                self._primitive = next(g for g in range(2, self.size) if self._is_primitive(g))
        return self._primitive

    def _build_tables(self):
        g = self.primitive_element()
        order = self.size - 1
        exp = [0] * order
        log = [0] * self.size
        x = 1
        for i in range(order):
            exp[i] = x
            log[x] = i
            x = self._poly_mul(x, g)
        self._exp, self._log = exp, log
        logger.debug(f"F_{self.p}^{self.m} 的 exp/log 表已建立（{self.size} 个元素）")

    def elements(self) -> Iterator[int]:
        """按整数编码顺序枚举全部元素

        Raises:
            SizeCapError: 域规模超出上限
        """
        if self.size > self.cap:
            raise SizeCapError(f"F_{self.p}^{self.m} 有 {self.size} 个元素，超出枚举上限 {self.cap}")
        return iter(range(self.size))

    def is_in_subfield(self, a: int, e: int) -> bool:
        """a 是否属于 F_{p^e}（即 a^{p^e} = a）"""
        return self.frobenius(a, e) == a

    def subfield_elements(self, e: int) -> List[int]:
        """子域 F_{p^e} 的全部元素，按整数编码升序

        Raises:
            InvalidFieldError: e 不整除 m
            SizeCapError: 子域规模超出上限
        """
        if self.m % e:
            raise InvalidFieldError(f"F_{self.p}^{e} 不是 F_{self.p}^{self.m} 的子域")
        sub_size = self.p ** e
        if sub_size > self.cap:
            raise SizeCapError(f"子域 F_{self.p}^{e} 有 {sub_size} 个元素，超出枚举上限 {self.cap}")
        if e == self.m:
            return list(range(self.size))
        if e == 1:
            return list(range(self.p))
        h = self.pow(self.primitive_element(), (self.size - 1) // (sub_size - 1))
        out = [0]
        x = 1
        for _ in range(sub_size - 1):
            out.append(x)
            x = self.mul(x, h)
        return sorted(out)

    def iter_subfield(self, e: int) -> Iterator[int]:
        """惰性枚举子域 F_{p^e}：先 0，再 1, h, h², …（h 为子域的本原元），不受枚举上限约束"""
        if self.m % e:
            raise InvalidFieldError(f"F_{self.p}^{e} 不是 F_{self.p}^{self.m} 的子域")
        sub_size = self.p ** e
        yield 0
        if e == 1:
            yield from range(1, self.p)
            return
        h = self.pow(self.primitive_element(), (self.size - 1) // (sub_size - 1))
        x = 1
        for _ in range(sub_size - 1):
            yield x
            x = self.mul(x, h)

    def degree_over(self, a: int, e: int) -> int:
        """a 在 F_{p^e} 上的次数：最小的 d 使 a^{(p^e)^d} = a"""
        x = a
        for d in range(1, self.m // e + 1):
            x = self.frobenius(x, e)
            if x == a:
                return d
        raise InvalidFieldError(f"元素 {a} 在 F_{self.p}^{e} 上的次数无法确定（e 不整除 m？）")

    # ------------------------------------------------------------ 文本
    def format(self, a: int) -> str:
        """多项式形式，生成元记为 g，例如 "g^2+2g+1" """
        if a == 0:
            return "0"
        terms = []
        for k, c in reversed(list(enumerate(self.coefficients(a)))):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                coeff = "" if c == 1 else str(c)
                terms.append(f"{coeff}g" + (f"^{k}" if k > 1 else ""))
        return "+".join(terms)

    def parse(self, text: str) -> int:
        """解析多项式形式的元素，如 "g^2+g+1"、"-1"、"2*g"

        Raises:
            ValueError: 无法解析
        """
        s = text.replace(" ", "").replace("*", "")
        if not s:
            raise ValueError("空的域元素")
        coeffs = [0] * max(self.m, 1)
        for sign, body in re.findall(r"([+-]?)([^+-]+)", s):
            match = re.fullmatch(r"(\d*)(g(?:\^(\d+))?)?", body)
            if not match or (not match.group(1) and not match.group(2)):
                raise ValueError(f"无法解析域元素: {text}")
            c = int(match.group(1)) if match.group(1) else 1
            k = 0 if not match.group(2) else int(match.group(3) or 1)
            if k >= self.m:
                raise ValueError(f"生成元的幂 {k} 超出扩张次数 {self.m}")
            coeffs[k] += -c if sign == "-" else c
        return self.from_coefficients(coeffs)

    def __repr__(self) -> str:
        return f"FiniteField(p={self.p}, m={self.m}, modulus={self.spec.modulus})"


@lru_cache(maxsize=32)
def _cached_field(p: int, m: int, cap: Optional[int]) -> FiniteField:
    return FiniteField(FieldSpec.canonical(p, m), cap)


def field_ops(spec: FieldSpec, cap: Optional[int] = None) -> FiniteField:
    """FieldSpec → 算术上下文"""
    return FiniteField(spec, cap)


def working_field(q: int, degree: int, cap: Optional[int] = None) -> Tuple[FiniteField, int]:
    """F_q 上 degree 次扩张的工作域 F_{p^{e·degree}}，返回 (域, e)"""
    factors = sympy.factorint(q)
    if q < 2 or len(factors) != 1:
        raise InvalidFieldError(f"q = {q} 不是素数幂")
    (p, e), = factors.items()
    return FiniteField.of(int(p), int(e) * degree, cap), int(e)


class FieldEmbedding:
    """F_{p^m} → F_{p^{mk}}：把生成元映到模多项式在大域中整数编码最小的根"""

    def __init__(self, base: FiniteField, target: FiniteField):
        if base.p != target.p or target.m % base.m:
            raise InvalidFieldError(f"F_{base.p}^{base.m} 不能嵌入 F_{target.p}^{target.m}")
        self.base = base
        self.target = target
        if base.m == 1:
            self._root = None
        else:
            self._root = next((r for r in target.elements() if self._eval_modulus(r) == 0), None)
            if self._root is None:
                raise InvalidFieldError(f"模多项式 {base.spec.modulus} 在 F_{target.p}^{target.m} 中没有根")
        self._powers = [target.pow(self._root, i) for i in range(base.m)] if self._root is not None else [1]

    def _eval_modulus(self, r: int) -> int:
        value = 0
        for c in self.base.spec.modulus:
            value = self.target.add(self.target.mul(value, r), self.target.scalar(c))
        return value

    def __call__(self, a: int) -> int:
        if self._root is None:
            return a
        terms = (self.target.mul(self.target.scalar(c), w)
                 for c, w in zip(self.base.coefficients(a), self._powers))
        return self.target.sum(terms)
