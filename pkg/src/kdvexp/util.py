"""
Helper utilities for kdvexp.
"""

from __future__ import annotations

import math
import os
import re
import sys
from typing import TYPE_CHECKING, NoReturn

if TYPE_CHECKING:
    from kdvexp.scheme import Scheme, SchemeConfig  # pragma: no cover
from kdvexp.exceptions import ConfigError, KdvError

THREADS_VARIABLE = "KDVEXP_THREADS"

_DYADIC_PATTERN = re.compile(
    r"^dyadic:2\^(?P<first>[+-]?\d+)\.\.2\^(?P<last>[+-]?\d+)(?::x(?P<factor>[^:]+))?$"
)
_PI_PATTERN = re.compile(
    r"^(?P<coeff>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?)"
    r"\s*\*?\s*(?:pi|π)$"
)


def die(message: str, *, status: int = 1) -> NoReturn:
    """
    Aborts the program with a final message.

    Args:
        message (str): The message to print
        status (int): The exit status
    """
    print(f"Fatal: {message}", file=sys.stderr)
    sys.exit(status)


def assert_never(x: NoReturn) -> NoReturn:
    """
    A hint to the typechecker that a branch can never occur.
    """
    assert False, f"unhandled type: {type(x).__name__}"  # pragma: no cover


def thread_count() -> int:
    """
    Returns the number of worker threads a study may use.

    The count comes from `KDVEXP_THREADS` when set, and from the machine's
    parallelism otherwise.
    """
    raw = os.getenv(THREADS_VARIABLE)
    if not raw:
        return os.cpu_count() or 1

    try:
        count = int(raw)
    except ValueError:
        raise KdvError(f"{THREADS_VARIABLE} must be an integer, got {raw!r}")

    if count < 1:
        raise KdvError(f"{THREADS_VARIABLE} must be positive, got {count}")
    return count


def parse_real(text: str) -> float:
    """
    Parses a real number, additionally accepting multiples of pi (`-5pi`, `2*pi`, `π`).

    Args:
        text (str): The text to parse

    Returns:
        The parsed value
    """
    text = text.strip()
    match = _PI_PATTERN.match(text)
    if match is not None:
        coeff = match.group("coeff")
        if coeff in ("", "+"):
            return math.pi
        elif coeff == "-":
            return -math.pi
        return float(coeff) * math.pi

    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"malformed number: {text!r}")


def parse_tau_list(text: str) -> list[float]:
    """
    Parses a list of time steps.

    Two forms are supported:

    * `dyadic:2^-7..2^-13:x0.5`, every power of two between the two exponents
      (inclusive), scaled by the optional factor
    * `0.01, 0.005, 0.0025`, an explicit comma-separated list

    Returns:
        The steps, strictly decreasing
    """
    text = text.strip()
    match = _DYADIC_PATTERN.match(text)
    if match is not None:
        first, last = int(match.group("first")), int(match.group("last"))
        factor = parse_real(match.group("factor")) if match.group("factor") else 1.0
        lo, hi = min(first, last), max(first, last)
        taus = [factor * 2.0**e for e in range(hi, lo - 1, -1)]
    elif text.startswith("dyadic"):
        raise ConfigError(f"malformed dyadic step list: {text!r}")
    else:
        taus = sorted({parse_real(t) for t in text.split(",") if t.strip()}, reverse=True)

    if not taus:
        raise ConfigError("empty step list")
    if any(tau <= 0 or not math.isfinite(tau) for tau in taus):
        raise ConfigError(f"time steps must be positive and finite, got {taus}")
    return taus


def format_float(value: float) -> str:
    """
    Formats a double so that parsing the result gives back the same double.
    """
    from kdvexp.constants import CSV_FLOAT_FORMAT

    return format(value, CSV_FLOAT_FORMAT)


def load_scheme(name: str, config: SchemeConfig) -> Scheme:
    """
    Loads the scheme class named `name` from `kdvexp.schemes`.

    For example, `load_scheme("ExpInt2", config)` returns an instance of
    `kdvexp.schemes.ExpInt2` configured with `config`.

    Returns:
        A `kdvexp.scheme.Scheme`.
    """
    import kdvexp.schemes

    scheme_class = getattr(kdvexp.schemes, name, None)
    if scheme_class is None:
        raise KdvError(f"Unknown scheme: {name}")

    return scheme_class(config)  # type: ignore[no-any-return]
