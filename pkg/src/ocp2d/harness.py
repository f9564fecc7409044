"""Verification pipelines: finite-n formulas and samples vs. asymptotics.

Each pipeline packs its comparison into an ``LdpTable`` (abscissa, finite-n
value, prediction, residual) or a small typed report.  Grid points are
independent and may be mapped over a thread pool; results are always
assembled in grid order, so the numbers never depend on the thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .edge import (
    gumbel_scaling,
    invn_correction,
    left_rate,
    left_tail_prediction,
    lognn_correction,
    right_rate,
)
from .equilibrium import (
    energy_excess,
    entropy_excess,
    leading_cumulant,
    transition_order,
)
from .errors import DomainError
from .exact import edge_cdf_log, edge_pdf_log, mgf_log
from .sampling import sample_kostlan, sample_mcmc

__all__ = [
    "LdpRow",
    "LdpTable",
    "left_tail_table",
    "right_tail_table",
    "left_tail_mcmc_table",
    "mgf_table",
    "extract_subleading",
    "subleading_coefficient",
    "CumulantRow",
    "CumulantReport",
    "cumulant_check",
    "GumbelReport",
    "gumbel_check",
    "TransitionRow",
    "TransitionReport",
    "transition_scan",
]

_EPS = 2.220446049250313e-16
_MAX_SCAN_ORDER = 6  # one-sided differences drown in roundoff beyond this


def _map_ordered(fn: Callable, items: Sequence, threads: int | None) -> list:
    """Apply fn to items, in order, optionally on a thread pool.

    The reduction order is the grid order either way, so results are
    independent of the degree of parallelism.
    """
    if threads is None or threads <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class LdpRow:
    abscissa: float
    finite_n_value: float
    prediction: float
    residual: float


@dataclass(frozen=True)
class LdpTable:
    """Rows of (abscissa, finite-n value, prediction, residual).

    The residual column is exactly finite_n_value - prediction (bitwise, so
    it survives a 17-digit CSV round trip), and rows are sorted by
    abscissa.  extra_columns carries pipeline-specific columns, each as
    long as rows.
    """

    abscissa_label: str
    rows: tuple[LdpRow, ...]
    metadata: dict[str, Any] = field(default_factory=dict)
    extra_columns: dict[str, tuple[float, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            if row.residual != row.finite_n_value - row.prediction:
                raise DomainError(
                    f"residual mismatch at {self.abscissa_label}={row.abscissa}"
                )
        abscissas = [row.abscissa for row in self.rows]
        if abscissas != sorted(abscissas):
            raise DomainError("rows must be sorted by abscissa")
        for name, col in self.extra_columns.items():
            if len(col) != len(self.rows):
                raise DomainError(f"extra column {name!r} has wrong length")

    def column_names(self) -> list[str]:
        return [self.abscissa_label, "finite_n_value", "prediction",
                "residual", *self.extra_columns]

    def row_values(self, i: int) -> list[float]:
        row = self.rows[i]
        base = [row.abscissa, row.finite_n_value, row.prediction, row.residual]
        return base + [col[i] for col in self.extra_columns.values()]

    def __len__(self) -> int:
        return len(self.rows)


def _make_rows(abscissas: Iterable[float],
               pairs: Iterable[tuple[float, float]]) -> tuple[LdpRow, ...]:
    return tuple(
        LdpRow(a, fin, pred, fin - pred)
        for a, (fin, pred) in zip(abscissas, pairs)
    )


def left_tail_table(n: int, x_grid: Sequence[float],
                    threads: int | None = None) -> LdpTable:
    """Exact left-tail exponent of the maximum modulus vs. its expansion.

    finite-n value: -(1/(2 n^2)) ln Pr[max modulus <= x]; prediction: rate
    function plus the (ln n)/n and 1/n corrections.  Extra columns carry
    the magnified gap (n/ln n)(finite - rate), whose limit is the (ln n)/n
    coefficient, against its two-term prediction.
    """
    n = int(n)
    if n < 10:
        raise DomainError(f"left-tail pipeline needs n >= 10, got {n}")
    xs = sorted(float(x) for x in x_grid)
    if not xs or xs[0] <= 0.0 or xs[-1] >= 1.0:
        raise DomainError("x grid must lie inside (0, 1)")

    def work(x: float) -> tuple[float, float]:
        return (-edge_cdf_log(n, x) / (2.0 * n * n), left_tail_prediction(x, n))

    pairs = _map_ordered(work, xs, threads)
    rows = _make_rows(xs, pairs)
    log_n = math.log(n)
    scaled_gap = tuple(
        (n / log_n) * (row.finite_n_value - left_rate(row.abscissa))
        for row in rows
    )
    scaled_pred = tuple(
        lognn_correction(x) + invn_correction(x) / log_n for x in xs
    )
    return LdpTable(
        "x", rows,
        metadata={"n": n, "beta": 2.0, "p": math.inf,
                  "finite": "-(1/(2 n^2)) edge_cdf_log",
                  "prediction": "left_tail_prediction"},
        extra_columns={"scaled_gap": scaled_gap,
                       "scaled_gap_prediction": scaled_pred},
    )


def right_tail_table(n: int, x_grid: Sequence[float],
                     threads: int | None = None) -> LdpTable:
    """Exact right-tail exponent of the maximum modulus vs. the rate function.

    finite-n value: -(1/(2n)) ln pdf(x); prediction: the single-particle
    transport cost -ln x + x^2/2 - 1/2.
    """
    n = int(n)
    if n < 10:
        raise DomainError(f"right-tail pipeline needs n >= 10, got {n}")
    xs = sorted(float(x) for x in x_grid)
    if not xs or xs[0] <= 1.0:
        raise DomainError("x grid must lie inside (1, inf)")

    def work(x: float) -> tuple[float, float]:
        return (-edge_pdf_log(n, x) / (2.0 * n), right_rate(x))

    rows = _make_rows(xs, _map_ordered(work, xs, threads))
    return LdpTable(
        "x", rows,
        metadata={"n": n, "beta": 2.0, "p": math.inf,
                  "finite": "-(1/(2n)) edge_pdf_log",
                  "prediction": "right_rate"},
    )


def left_tail_mcmc_table(n: int, beta: float, x_grid: Sequence[float],
                         sweeps: int = 4000, burn_in: int = 500,
                         thinning: int = 2, seed: int = 0,
                         initial_step: float = 0.25) -> LdpTable:
    """Leading-order left tail at general coupling, from Metropolis draws.

    The empirical tail fraction Pr[max modulus <= x] only resolves
    probabilities down to ~1/draws, so this is a qualitative check near
    x = 1 at small n; grid points with no hits get an infinite exponent.
    """
    batch = sample_mcmc(n, beta, sweeps, burn_in, thinning, math.inf, seed,
                        initial_step)
    xs = sorted(float(x) for x in x_grid)
    if not xs or xs[0] <= 0.0 or xs[-1] >= 1.0:
        raise DomainError("x grid must lie inside (0, 1)")
    count = batch.count
    pairs = []
    for x in xs:
        hits = int(np.count_nonzero(batch.values <= x))
        if hits == 0:
            finite = math.inf
        else:
            finite = -math.log(hits / count) / (beta * n * n)
        pairs.append((finite, left_rate(x)))
    return LdpTable(
        "x", _make_rows(xs, pairs),
        metadata={"n": int(n), "beta": float(beta), "p": math.inf,
                  "finite": "-(1/(beta n^2)) ln empirical CDF",
                  "prediction": "left_rate", "qualitative": True,
                  "draws": count, "seed": int(seed)},
    )


def subleading_coefficient(p: float, s: float, beta: float = 2.0) -> float:
    """Predicted 1/n coefficient of the tilted free energy: ((4-beta)/(4 beta))
    times the entropy excess.

    Pinned against the exact generating function only at beta = 2, where it
    is + (1/4) entropy_excess; the beta-dependence away from 2 is untested
    and callers must flag it (see untested_beta).
    """
    beta = float(beta)
    if not (math.isfinite(beta) and beta > 0.0):
        raise DomainError(f"beta must be positive, got {beta}")
    return (4.0 - beta) / (4.0 * beta) * entropy_excess(p, s)


def untested_beta(beta: float) -> bool:
    """True when the 1/n coefficient's beta-dependence has no oracle."""
    return float(beta) != 2.0


def mgf_table(n: int, p: float, s_grid: Sequence[float],
              threads: int | None = None) -> LdpTable:
    """Tilted free energy -(1/(2 n^2)) ln MGF vs. its large-n limit.

    Extra columns: the magnified gap n (finite - limit), its predicted
    limit (the 1/n coefficient at coupling 2), and the quadrature error
    estimate.
    """
    n = int(n)
    ss = sorted(float(s) for s in s_grid)
    if not ss:
        raise DomainError("empty tilt grid")

    def work(s: float) -> tuple[float, float, float]:
        res = mgf_log(n, p, s)
        return (-res.log_value / (2.0 * n * n), energy_excess(p, s),
                res.estimated_relative_error)

    triples = _map_ordered(work, ss, threads)
    rows = _make_rows(ss, [(fin, pred) for fin, pred, _ in triples])
    gap = tuple(n * row.residual for row in rows)
    gap_pred = tuple(subleading_coefficient(p, s) for s in ss)
    return LdpTable(
        "s", rows,
        metadata={"n": n, "beta": 2.0, "p": float(p),
                  "finite": "-(1/(2 n^2)) mgf_log",
                  "prediction": "energy_excess"},
        extra_columns={
            "subleading_gap": gap,
            "subleading_prediction": gap_pred,
            "quadrature_error": tuple(err for _, _, err in triples),
        },
    )


def extract_subleading(p: float, s: float, n_list: Sequence[int]) -> float:
    """Extrapolated limit of n (finite-n free energy - its n=inf limit).

    Models the magnified gap as c1 + c2/n + c3/n^2; three sizes determine
    the coefficients exactly (more are fitted by least squares) and c1 is
    the extrapolated 1/n coefficient.
    """
    sizes = [int(n) for n in n_list]
    if len(sizes) < 3 or sorted(set(sizes)) != sizes:
        raise DomainError("need at least three strictly increasing sizes")
    limit = energy_excess(p, s)
    gaps = []
    for n in sizes:
        finite = -mgf_log(n, p, s).log_value / (2.0 * n * n)
        gaps.append(n * (finite - limit))
    a = np.array([[1.0, 1.0 / n, 1.0 / n**2] for n in sizes])
    y = np.array(gaps)
    if len(sizes) == 3:
        coeff = np.linalg.solve(a, y)
    else:
        coeff, *_ = np.linalg.lstsq(a, y, rcond=None)
    return float(coeff[0])


# --- cumulants ---------------------------------------------------------------


@dataclass(frozen=True)
class CumulantRow:
    order: int
    numeric: float
    predicted: float
    relative_error: float
    passed: bool


@dataclass(frozen=True)
class CumulantReport:
    p: float
    beta: float
    n: int
    tolerance: float
    rows: tuple[CumulantRow, ...]

    @property
    def all_passed(self) -> bool:
        return all(row.passed for row in self.rows)


def _derivatives_at_zero(p: float, h: float) -> tuple[float, float, float]:
    """(E', E'', E''') of the tilted energy at s = 0+, one step size.

    Forward second-order stencils on the positive-tilt side only: the
    energy is analytic there for every p, whereas any stencil reaching
    into s < 0 picks up the one-sided singular part at the transition
    (e.g. an O(h^{2/3}) bias in the second difference at p = 1/2).
    """
    e0, e1, e2, e3, e4 = (energy_excess(p, j * h) for j in range(5))
    d1 = (-3.0 * e0 + 4.0 * e1 - e2) / (2.0 * h)
    d2 = (2.0 * e0 - 5.0 * e1 + 4.0 * e2 - e3) / (h * h)
    d3 = (-2.5 * e0 + 9.0 * e1 - 12.0 * e2 + 7.0 * e3 - 1.5 * e4) / h**3
    return d1, d2, d3


def cumulant_check(p: float, beta: float, n: int,
                   orders: Sequence[int] | None = None,
                   tolerance: float = 1e-4) -> CumulantReport:
    """Numeric derivatives of the tilted energy at 0+ vs. cumulant formulas.

    Uses steps 1e-3 and 5e-4 combined by one Richardson step.  Defaults to
    the derivative orders that exist for this p (the order at or above the
    phase-transition order is excluded); requesting such an order raises
    the singularity error from leading_cumulant.
    """
    p = float(p)
    beta = float(beta)
    n = int(n)
    if orders is None:
        trans = transition_order(p)
        top = 3 if trans.analytic else min(3, trans.order - 1)
        orders = tuple(range(1, top + 1))
    coarse = _derivatives_at_zero(p, 1e-3)
    fine = _derivatives_at_zero(p, 5e-4)
    richardson = [(4.0 * f - c) / 3.0 for c, f in zip(coarse, fine)]

    # Map tilted-energy derivatives to cumulants of the statistic: the
    # generating function is -(beta n^2) E(s) in the tilt s, so
    # kappa_1 = E'(0), kappa_2 = -E''(0)/(beta n^2),
    # kappa_3 = E'''(0)/(beta n^2)^2.
    scale = beta * n * n
    numeric = {1: richardson[0], 2: -richardson[1] / scale,
               3: richardson[2] / (scale * scale)}
    rows = []
    for order in orders:
        if order not in numeric:
            raise DomainError(f"cumulant order must be 1, 2, or 3, got {order}")
        predicted = leading_cumulant(p, beta, n, order)
        rel = abs(numeric[order] - predicted) / abs(predicted)
        rows.append(CumulantRow(order, numeric[order], predicted, rel,
                                rel <= tolerance))
    return CumulantReport(p, beta, n, tolerance, tuple(rows))


# --- extreme-value regime ----------------------------------------------------


@dataclass(frozen=True)
class GumbelReport:
    n: int
    draws: int
    seed: int
    ks_distance: float
    low_n: bool

    @property
    def passed(self) -> bool:
        return self.ks_distance <= 0.05


def gumbel_check(n: int, draws: int, seed: int) -> GumbelReport:
    """Sup-distance between standardized maxima and the double-exponential law.

    Draws maxima with the exact coupling-2 sampler, standardizes them with
    the slowly-converging logarithmic constants, and reports the
    Kolmogorov-Smirnov distance to exp(-e^{-z}).  Convergence is
    logarithmic, so the check is qualitative; n below 1000 is flagged.
    """
    draws = int(draws)
    if draws < 2:
        raise DomainError(f"need at least two draws, got {draws}")
    scaling = gumbel_scaling(n)
    batch = sample_kostlan(n, draws, math.inf, seed)
    z = np.sort(scaling.standardize(batch.values))
    cdf = np.exp(-np.exp(-z))
    grid = np.arange(1, draws + 1) / draws
    distance = float(np.maximum(np.abs(grid - cdf),
                                np.abs(grid - 1.0 / draws - cdf)).max())
    return GumbelReport(int(n), draws, int(seed), distance, n < 1000)


# --- phase-transition scan ---------------------------------------------------


@dataclass(frozen=True)
class TransitionRow:
    order: int
    step: float
    left: float
    right: float
    jump: float
    jump_refined: float
    noise_floor: float
    discontinuous: bool


@dataclass(frozen=True)
class TransitionReport:
    p: float
    expected_order: int | None  # None when the energy is analytic
    resolvable: bool
    rows: tuple[TransitionRow, ...]

    @property
    def detected_order(self) -> int | None:
        for row in self.rows:
            if row.discontinuous:
                return row.order
        return None


def _onesided_weights(order: int) -> np.ndarray:
    """Weights w_j on nodes j = 0..order+1 with sum w_j f(j h) =
    h^order f^(order)(0) + O(h^{order+2})."""
    m = order + 2
    v = np.array([[float(j) ** k for j in range(m)] for k in range(m)])
    rhs = np.zeros(m)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(v, rhs)


def _onesided_derivative(p: float, order: int, h: float,
                         side: int) -> tuple[float, float]:
    """One-sided estimate of the order-th derivative of the tilted energy
    at 0, from the given side; returns (estimate, roundoff scale)."""
    w = _onesided_weights(order)
    values = [energy_excess(p, side * j * h) for j in range(order + 2)]
    est = math.fsum(wj * vj for wj, vj in zip(w, values)) / h**order
    sign = 1.0 if side > 0 or order % 2 == 0 else -1.0
    noise = float(np.abs(w).sum()) / h**order * max(
        1.0, max(abs(v) for v in values)
    )
    return sign * est, noise


def transition_scan(p: float, s_window: float = 0.45,
                    step: float | None = None) -> TransitionReport:
    """Locate the lowest derivative order of the tilted energy that jumps
    across s = 0.

    For each order m up to the expected transition order (capped at 6 —
    higher one-sided differences drown in roundoff) the derivative is
    estimated from both sides at steps h and h/2, with h = 10^{-6/m} by
    default, clamped so all nodes stay inside the window.  A jump is
    declared when the refined two-sided gap stays above the roundoff floor
    and does not shrink like a truncation artifact (ratio >= 0.75).
    """
    p = float(p)
    if not (0.0 < p <= 2.0):
        raise DomainError(f"transition scan needs 0 < p <= 2, got {p}")
    if not (math.isfinite(s_window) and s_window > 0.0):
        raise DomainError(f"window must be positive, got {s_window}")
    if p == 2.0:
        s_window = min(s_window, 0.45)  # stability boundary at -1/2
    trans = transition_order(p)
    if trans.analytic:
        expected = None
        top = 4
    else:
        expected = trans.order
        top = min(expected, _MAX_SCAN_ORDER)

    rows = []
    for order in range(1, top + 1):
        h = step if step is not None else 10.0 ** (-6.0 / order)
        h = min(h, s_window / (order + 1))
        right, noise_r = _onesided_derivative(p, order, h, +1)
        left, noise_l = _onesided_derivative(p, order, h, -1)
        jump = right - left
        right2, _ = _onesided_derivative(p, order, 0.5 * h, +1)
        left2, _ = _onesided_derivative(p, order, 0.5 * h, -1)
        jump2 = right2 - left2
        floor = 100.0 * _EPS * 4.0 * (noise_r + noise_l)
        stable = abs(jump2) >= 0.75 * abs(jump)
        discontinuous = bool(stable and abs(jump2) > floor and abs(jump) > floor)
        rows.append(TransitionRow(order, h, left, right, jump, jump2, floor,
                                  discontinuous))
    resolvable = trans.analytic or expected <= _MAX_SCAN_ORDER
    return TransitionReport(p, expected, resolvable, tuple(rows))
