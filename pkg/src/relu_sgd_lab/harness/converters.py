"""命令列參數與設定值的型別轉換函數"""

import math
from typing import Any, Optional

U64_MAX = (1 << 64) - 1


def safe_float(value: Any) -> Optional[float]:
    """
    嘗試將值轉換為有限的 float。轉換失敗、NaN 或 Inf 時返回 None。

    Args:
        value: 要轉換的值

    Returns:
        float 或 None（轉換失敗時）

    Examples:
        >>> safe_float(" 0.5 ")
        0.5
        >>> safe_float("inf") is None
        True
        >>> safe_float("abc") is None
        True
    """
    if value is None or isinstance(value, bool):
        return None
    if isinstance(value, str):
        value = value.strip()
        if not value:
            return None
    try:
        result = float(value)
    except (ValueError, TypeError):
        return None
    return result if math.isfinite(result) else None


def safe_int(value: Any) -> Optional[int]:
    """
    嘗試將值轉換為整數；只接受沒有小數部分的數值。

    Examples:
        >>> safe_int("42")
        42
        >>> safe_int("3.0")
        3
        >>> safe_int("3.5") is None
        True
        >>> safe_int(str(2**53 + 1))
        9007199254740993
    """
    if value is None or isinstance(value, bool):
        return None
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        # 整數字串直接以 int 解析，保留超過 2^53 的位數
        try:
            return int(value.strip())
        except ValueError:
            pass
    number = safe_float(value)
    if number is None or number != int(number):
        return None
    return int(number)


def parse_seed(text: str) -> int:
    """
    解析 64 位元無號整數種子 (十進位或 0x 十六進位)。

    Examples:
        >>> parse_seed("42")
        42
        >>> parse_seed("0xff")
        255
    """
    try:
        seed = int(str(text).strip(), 0)
    except ValueError:
        raise ValueError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= seed <= U64_MAX:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    return seed


def format_float(value: Optional[float]) -> str:
    """
    CSV 與報表用的浮點數字串：None 為空字串，其他使用最短可還原表示 (repr)。

    Examples:
        >>> format_float(None)
        ''
        >>> format_float(0.1)
        '0.1'
    """
    if value is None:
        return ""
    return repr(float(value))
