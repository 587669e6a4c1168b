"""
有理数工具

工作负载中的时长一律使用 fractions.Fraction 精确表示。
文件中接受十进制字符串（"8.8"）与 "p/q" 形式；输出时精确形式为权威值，十进制仅用于展示。
"""

import math
from decimal import Decimal, localcontext
from fractions import Fraction
from numbers import Rational
from typing import Any, Iterable, List, Union

RationalLike = Union[int, str, Fraction, Decimal, float]


def parse_rational(value: Any) -> Fraction:
    """把 int / Fraction / Decimal / 十进制字符串 / "p/q" 字符串解析为 Fraction

    Raises:
        ValueError: 值无法精确解析或不是有限数
    """
    if isinstance(value, bool):
        raise ValueError(f"不是有理数: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ValueError(f"不是有限数: {value!r}")
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"不是有限数: {value!r}")
        # JSON 数字按其十进制字面量解析，8.8 -> 44/5 而不是二进制近似值
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("空字符串不是有理数")
        try:
            result = Fraction(text)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"无法解析有理数 {value!r}: {e}") from e
        return result
    raise ValueError(f"不支持的有理数类型: {type(value).__name__}")


def parse_rational_list(values: Iterable[Any]) -> List[Fraction]:
    return [parse_rational(v) for v in values]


def format_exact(value: Fraction) -> str:
    """精确形式：整数输出 "n"，否则 "p/q" """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value: Fraction, digits: int = 15) -> str:
    """按有效数字位数渲染十进制形式（仅用于展示）

    >>> format_decimal(Fraction(107, 3))
    '35.6666666666667'
    """
    value = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(value.numerator) / Decimal(value.denominator)
        if d == 0:
            return "0"
        return format(d.normalize(), 'f')


def format_percent(value: Fraction, places: int = 2) -> str:
    return f"{float(value) * 100:.{places}f}%"
