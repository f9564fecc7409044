"""Log-space special functions and accumulation primitives.

Everything downstream that multiplies long products of tiny probabilities
(the edge distribution multiplies up to a few hundred factors, each possibly
far below the double-precision underflow threshold) goes through the
routines in this module, which never materialize the underflowing values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import DomainError, NumericalError

__all__ = [
    "LogValue",
    "log_gamma",
    "reg_lower_gamma",
    "reg_upper_gamma",
    "log_reg_lower_gamma",
    "log_lower_gamma",
    "log_sum_exp",
]

_MAX_ITER = 10_000
_EPS = 2.220446049250313e-16


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if math.isnan(value) or math.isinf(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def log_gamma(a: float) -> float:
    """Natural log of the gamma function for positive real ``a``."""
    a = _check_finite("a", a)
    if a <= 0.0:
        raise DomainError(f"log_gamma requires a > 0, got {a}")
    return math.lgamma(a)


def _log_lower_series(a: float, y: float) -> float:
    # ln P(a, y) by the ascending series
    #   P(a, y) = y^a e^{-y} / Gamma(a+1) * sum_{n>=0} y^n / prod_{m<=n} (a+m),
    # every term positive, so the sum carries no cancellation.
    term = 1.0
    total = 1.0
    for n in range(1, _MAX_ITER + 1):
        term *= y / (a + n)
        total += term
        if term <= total * _EPS:
            return a * math.log(y) - y - math.lgamma(a + 1.0) + math.log(total)
    raise NumericalError(
        f"lower incomplete gamma series stalled: a={a}, y={y}, "
        f"iterations={_MAX_ITER}, last relative term={term / total:.3e}"
    )


def _log_upper_cf(a: float, y: float) -> float:
    # ln Q(a, y) by the Lentz continued fraction, valid for y >= a + 1.
    tiny = 1e-300
    b = y + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b if b != 0.0 else 1.0 / tiny
    f = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        f *= delta
        if abs(delta - 1.0) <= _EPS:
            return a * math.log(y) - y - math.lgamma(a) + math.log(f)
    raise NumericalError(
        f"upper incomplete gamma continued fraction stalled: a={a}, y={y}, "
        f"iterations={_MAX_ITER}"
    )


def _validate_gamma_args(a: float, y: float) -> tuple[float, float]:
    a = _check_finite("a", a)
    y = _check_finite("y", y)
    if a <= 0.0:
        raise DomainError(f"incomplete gamma requires a > 0, got a={a}")
    if y < 0.0:
        raise DomainError(f"incomplete gamma requires y >= 0, got y={y}")
    return a, y


def log_reg_lower_gamma(a: float, y: float) -> float:
    """ln P(a, y), the log of the regularized lower incomplete gamma.

    Stays accurate when P underflows: values below -1e5 are routine for
    the far left tail of the edge distribution.  Returns ``-inf`` at y=0.
    """
    a, y = _validate_gamma_args(a, y)
    if y == 0.0:
        return -math.inf
    if y < a + 1.0:
        return _log_lower_series(a, y)
    log_q = _log_upper_cf(a, y)
    # P = 1 - Q; Q <= ~0.5 in this branch so log1p is safe.
    return math.log1p(-math.exp(log_q))


def reg_lower_gamma(a: float, y: float) -> float:
    """P(a, y) = gamma(a, y) / Gamma(a), in [0, 1]."""
    a, y = _validate_gamma_args(a, y)
    if y == 0.0:
        return 0.0
    if y < a + 1.0:
        return math.exp(_log_lower_series(a, y))
    return -math.expm1(_log_upper_cf(a, y))


def reg_upper_gamma(a: float, y: float) -> float:
    """Q(a, y) = 1 - P(a, y), evaluated on its own branch when that is the
    accurate one (large ``y``)."""
    a, y = _validate_gamma_args(a, y)
    if y == 0.0:
        return 1.0
    if y < a + 1.0:
        return -math.expm1(_log_lower_series(a, y))
    return math.exp(_log_upper_cf(a, y))


def log_lower_gamma(a: float, y: float) -> float:
    """ln gamma(a, y), the log of the unregularized lower incomplete gamma."""
    return log_reg_lower_gamma(a, y) + math.lgamma(a)


def log_sum_exp(terms: Iterable[float]) -> float:
    """ln sum_i exp(terms_i), shifted by the running maximum.

    Accepts log-magnitudes of any size (including ``-inf`` for exact zero
    contributions); an empty input is a domain error since the log of an
    empty sum does not exist.
    """
    values = [float(t) for t in terms]
    if not values:
        raise DomainError("log_sum_exp of an empty sequence")
    m = max(values)
    if math.isinf(m) and m < 0:
        return -math.inf
    if math.isnan(m) or (math.isinf(m) and m > 0):
        raise DomainError(f"log_sum_exp term out of range: {m!r}")
    return m + math.log(math.fsum(math.exp(v - m) for v in values))


@dataclass(frozen=True)
class LogValue:
    """A nonnegative real carried as (is_zero, log magnitude).

    Multiplication adds logs and addition goes through a two-term
    log-sum-exp, so products of hundreds of factors each near e^{-1e5}
    stay representable.
    """

    log_magnitude: float
    is_zero: bool = False

    def __post_init__(self) -> None:
        if self.is_zero:
            object.__setattr__(self, "log_magnitude", -math.inf)
        elif math.isnan(self.log_magnitude):
            raise DomainError("LogValue log magnitude is NaN")

    @classmethod
    def zero(cls) -> "LogValue":
        return cls(-math.inf, is_zero=True)

    @classmethod
    def one(cls) -> "LogValue":
        return cls(0.0)

    @classmethod
    def from_log(cls, log_magnitude: float) -> "LogValue":
        if math.isinf(log_magnitude) and log_magnitude < 0:
            return cls.zero()
        return cls(float(log_magnitude))

    @classmethod
    def from_value(cls, value: float) -> "LogValue":
        value = _check_finite("value", value)
        if value < 0.0:
            raise DomainError(f"LogValue requires a nonnegative value, got {value}")
        if value == 0.0:
            return cls.zero()
        return cls(math.log(value))

    def value(self) -> float:
        """Back to an ordinary float (0.0, or +inf on overflow)."""
        if self.is_zero:
            return 0.0
        try:
            return math.exp(self.log_magnitude)
        except OverflowError:
            return math.inf

    def __mul__(self, other: "LogValue") -> "LogValue":
        if self.is_zero or other.is_zero:
            return LogValue.zero()
        return LogValue(self.log_magnitude + other.log_magnitude)

    def __add__(self, other: "LogValue") -> "LogValue":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        hi = max(self.log_magnitude, other.log_magnitude)
        lo = min(self.log_magnitude, other.log_magnitude)
        return LogValue(hi + math.log1p(math.exp(lo - hi)))
