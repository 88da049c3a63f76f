"""Accuracy and sample-efficiency scores and their aggregation across runs."""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

N_BINS = 5
SUMMARY_COLUMNS = ("function", "dim", "strategy", "rep", "best_r2", "r2_area", "rank_r2", "rank_r2area")
RANK_COLUMNS = ("strategy", "n", "mean_r2", "se_r2", "mean_r2area", "se_r2area",
                "mean_rank_r2", "se_rank_r2", "mean_rank_r2area", "se_rank_r2area")


class UndefinedMetricError(ValueError):
    pass


def r2(y_true, y_pred) -> float:
    """Coefficient of determination; unbounded below."""
    y = np.asarray(y_true, dtype=float).ravel()
    yh = np.asarray(y_pred, dtype=float).ravel()
    if y.shape != yh.shape:
        raise ValueError("y_true and y_pred differ in length")
    if y.size < 2:
        raise UndefinedMetricError("R^2 needs at least two samples")
    ss_tot = np.sum((y - y.mean()) ** 2)
    if not ss_tot > 0:
        raise UndefinedMetricError("R^2 is undefined for a constant target")
    return float(1.0 - np.sum((y - yh) ** 2) / ss_tot)


def r2_area(history) -> float:
    """Normalized area under a clamped R^2 history ``r_0 .. r_s``.

    Composite Simpson over the last even number of intervals, with a
    trapezoid on the first interval when ``s`` is odd. For ``s = 1`` the
    Simpson part is empty and only the trapezoid remains.
    """
    r = np.asarray(history, dtype=float).ravel()
    s = r.size - 1
    if s < 1:
        raise ValueError("R^2 area needs at least two history entries")
    xi = s % 2
    f_tr = xi * (r[0] + r[1]) / 2.0
    seg = r[xi:]
    if seg.size < 3:
        f_s = 0.0
    else:
        f_s = (seg[0] + seg[-1] + 4.0 * seg[1:-1:2].sum() + 2.0 * seg[2:-1:2].sum()) / 3.0
    return float((f_s + f_tr) / s)


def iqd(values, axis=0):
    q75, q25 = np.percentile(values, [75, 25], axis=axis)
    return q75 - q25


def binned_means(history, n_bins: int = N_BINS) -> np.ndarray:
    """Means of ``n_bins`` near-equal consecutive chunks; empty chunks give NaN."""
    chunks = np.array_split(np.asarray(history, dtype=float), n_bins)
    return np.array([b.mean() if b.size else np.nan for b in chunks])


def average_ranks(values, higher_is_better: bool = True) -> np.ndarray:
    """Ranks 1..K with ties sharing the average rank."""
    v = np.asarray(values, dtype=float)
    return rankdata(-v if higher_is_better else v, method="average")


def _se(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.std(x, ddof=1) / np.sqrt(x.size)) if x.size > 1 else 0.0


@dataclass
class RunScore:
    """The per-run numbers aggregation needs."""

    function: str
    dim: int
    strategy: str
    rep: int
    history: np.ndarray

    @property
    def best_r2(self) -> float:
        return float(np.max(self.history))

    @property
    def r2_area(self) -> float:
        return r2_area(self.history)


@dataclass
class Summary:
    rows: list = field(default_factory=list)
    rank_table: list = field(default_factory=list)
    median_curves: dict = field(default_factory=dict)
    iqd_bins: dict = field(default_factory=dict)


def _as_score(r) -> RunScore:
    if isinstance(r, RunScore):
        return r
    return RunScore(r.function, int(r.dim), r.strategy, int(r.rep), np.asarray(r.r2_history, dtype=float))


def _curve_stats(group):
    L = min(g.history.size for g in group)
    H = np.array([g.history[:L] for g in group])
    means = np.array([binned_means(h) for h in H])
    return np.median(H, axis=0), iqd(means, axis=0)


def aggregate(results) -> Summary:
    """Median curves, binned IQDs and per-repetition strategy ranks.

    Ranks are assigned within each (function, repetition) cell and averaged
    over all cells a strategy appears in.
    """
    scores = [_as_score(r) for r in results]
    if not scores:
        raise ValueError("nothing to aggregate")
    out = Summary()

    cells = defaultdict(list)
    for s in scores:
        cells[(s.function, s.rep)].append(s)
    ranks = {}
    for key, group in cells.items():
        rk_r2 = average_ranks([g.best_r2 for g in group])
        rk_area = average_ranks([g.r2_area for g in group])
        for g, a, b in zip(group, rk_r2, rk_area):
            ranks[id(g)] = (float(a), float(b))

    for s in sorted(scores, key=lambda s: (s.dim, s.function, s.strategy, s.rep)):
        a, b = ranks[id(s)]
        out.rows.append(dict(function=s.function, dim=s.dim, strategy=s.strategy, rep=s.rep,
                             best_r2=s.best_r2, r2_area=s.r2_area, rank_r2=a, rank_r2area=b))

    by_strategy = defaultdict(list)
    for row in out.rows:
        by_strategy[row["strategy"]].append(row)
    for name in sorted(by_strategy):
        rows = by_strategy[name]
        col = lambda k: [r[k] for r in rows]
        out.rank_table.append(dict(
            strategy=name, n=len(rows),
            mean_r2=float(np.mean(col("best_r2"))), se_r2=_se(col("best_r2")),
            mean_r2area=float(np.mean(col("r2_area"))), se_r2area=_se(col("r2_area")),
            mean_rank_r2=float(np.mean(col("rank_r2"))), se_rank_r2=_se(col("rank_r2")),
            mean_rank_r2area=float(np.mean(col("rank_r2area"))), se_rank_r2area=_se(col("rank_r2area")),
        ))

    groups = defaultdict(list)
    for s in scores:
        groups[(s.function, s.strategy)].append(s)
        groups[(f"dim{s.dim}", s.strategy)].append(s)
    for key, group in sorted(groups.items()):
        out.median_curves[key], out.iqd_bins[key] = _curve_stats(group)
    return out


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.10g}"
    return str(v)


def _write(rows, columns, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])


def write_summary_csv(summary: Summary, path) -> None:
    _write(summary.rows, SUMMARY_COLUMNS, path)


def write_rank_table_csv(summary: Summary, path) -> None:
    _write(summary.rank_table, RANK_COLUMNS, path)
