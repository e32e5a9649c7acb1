"""Seeded Monte Carlo experiments comparing simulated rounding errors with predictions.

Trials are generated in fixed-size blocks.  Block ``b`` of grid point ``g``
draws from its own Philox stream keyed by ``(seed, g, b)``, so results do not
depend on how blocks are scheduled, and partial sums are merged in block
order.  CSV outputs start with comment lines holding the full config and
the seed; floats are written with ``repr`` so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction

import numpy as np

from . import kernels as K
from .bounds import BoundParams, bound_report
from .distributions import parse_dist, sample_wishart, sample_wishart_chol
from .formats import make_format, rounder
from .moments import hbar_fast, inner_variance, lu_variances, sigma2_exact, hbar_exact, trisolve_variances

DEFAULT_SEED = 20240917
KERNELS = ("dot", "matvec", "matmul", "trisolve", "lu")
MSE_COLUMNS = ("panel", "kernel", "format", "dist_x", "dist_y", "n", "m", "p", "element", "trials", "seed",
               "mse_sim", "var_sim", "mean_sim", "se_mse", "analytic", "ratio")
BOUND_COLS = ("db1", "pb1", "pb2", "db2", "pb3", "corollary")


def _grid(v) -> list[int]:
    if v is None:
        return []
    if isinstance(v, (int, np.integer)):
        return [int(v)]
    if isinstance(v, str):
        return [int(a) for a in v.split(",") if a.strip()]
    return [int(a) for a in v]


@dataclass
class ExperimentConfig:
    """One Monte Carlo sweep over a dimension grid."""

    kernel: str = "dot"
    format: str = "fp32"
    dist_x: str = "uniform:0,1"
    dist_y: str = "uniform:0,1"
    n_grid: list = field(default_factory=lambda: [10, 100, 1000, 10000])
    m_grid: list = field(default_factory=lambda: [10])
    p_grid: list = field(default_factory=lambda: [10])
    trials: int = 10000
    seed: int = DEFAULT_SEED
    experiment: str = "mse"
    order: str = "sequential"
    block: int = 1000
    workers: int = 1
    bounds: bool = False
    lam: float = 1.0
    zeta: float = 1e-16
    eta: float = 0.1

    def __post_init__(self):
        self.n_grid, self.m_grid, self.p_grid = _grid(self.n_grid), _grid(self.m_grid), _grid(self.p_grid)
        self.format = str(self.format)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names - {"out", "p"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if "p" in d:
            d["p_grid"] = d.pop("p")
        d.pop("out", None)
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def points(self) -> list[dict]:
        k = self.kernel
        if k == "dot":
            return [{"n": n} for n in self.n_grid]
        if k == "matvec":
            return [{"m": m, "n": n} for m in self.m_grid for n in self.n_grid]
        if k == "matmul":
            return [{"m": m, "n": n, "p": p} for m in self.m_grid for n in self.n_grid for p in self.p_grid]
        return [{"n": n, "m": m} for n in self.n_grid for m in self.m_grid]

    def validate(self):
        if self.kernel not in KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}; expected one of {KERNELS}")
        make_format(self.format)
        parse_dist(self.dist_x)
        parse_dist(self.dist_y)
        if self.trials < 100:
            raise ValueError(f"trials must be >= 100, got {self.trials}")
        if self.block < 1:
            raise ValueError("block must be >= 1")
        if self.order not in K.ORDERS:
            raise ValueError(f"order must be one of {K.ORDERS}")
        for pt in self.points():
            if min(pt.values()) < 1:
                raise ValueError(f"dimensions must be >= 1: {pt}")
            if self.kernel == "trisolve" and not pt["m"] > pt["n"] + 1:
                raise ValueError(f"m must exceed n+1 for triangular solves (n={pt['n']}, m={pt['m']})")
            if self.kernel == "lu" and not pt["m"] > pt["n"] + 3:
                raise ValueError(f"m must exceed n+3 for LU (n={pt['n']}, m={pt['m']})")
        if not self.points():
            raise ValueError("empty dimension grid")


# ---------------------------------------------------------------------------
# per-block simulation
# ---------------------------------------------------------------------------

def block_rng(seed: int, point: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(point, block))))


def _lu_elements(n: int) -> list[tuple[str, int, int]]:
    out = []
    for k in range(1, n + 1):
        out.append(("u", k, k))
        if k < n:
            out.append(("u", k, n))
            out.append(("l", k + 1, k))
    return out


def _element_name(f, i, j):
    return f"{f}{i}{j}" if max(i, j) < 10 else f"{f}[{i},{j}]"


def simulate_block(cfg: ExperimentConfig, pt: dict, rng: np.random.Generator, size: int) -> dict:
    """Run ``size`` trials at one grid point; return ``{element: (deltas[size, k], mode)}``.

    ``mode`` is ``"pool"`` (report the per-entry MSE) or ``"rowsum"`` (sum of
    per-entry MSEs, as for one row of an autocorrelation matrix).
    """
    fmt = cfg.format
    dx, dy = parse_dist(cfg.dist_x), parse_dist(cfg.dist_y)
    k = cfg.kernel
    if k == "dot":
        n = pt["n"]
        r = K.rounded_dot(dx.sample(rng, (size, n)), dy.sample(rng, (size, n)), fmt)
        return {"s": (r.delta[:, None], "pool")}
    if k == "matvec":
        m, n = pt["m"], pt["n"]
        r = K.rounded_matvec(dx.sample(rng, (size, m, n)), dy.sample(rng, (size, n)), fmt)
        return {"y": (r.delta, "pool")}
    if k == "matmul":
        m, n, p = pt["m"], pt["n"], pt["p"]
        r = K.rounded_matmul(dx.sample(rng, (size, m, n)), dy.sample(rng, (size, n, p)), fmt)
        row = 1 if m >= 2 else 0
        return {f"R{row + 1}{row + 1}": (r.delta[:, row, :], "rowsum"),
                "C": (r.delta.reshape(size, -1), "pool")}
    n, m = pt["n"], pt["m"]
    if k == "trisolve":
        T = sample_wishart_chol(n, m, rng, size)
        b = rng.standard_normal((size, n))
        r = K.rounded_forward_subst(T, b, fmt, order=cfg.order)
        return {f"x{i + 1}": (r.delta[:, i:i + 1], "pool") for i in range(n)}
    A = sample_wishart(n, m, rng, size)
    r = K.rounded_lu_doolittle(A, fmt, order=cfg.order)
    out = {}
    for f, i, j in _lu_elements(n):
        d = (r.dU if f == "u" else r.dL)[:, i - 1, j - 1]
        out[_element_name(f, i, j)] = (d[:, None], "pool")
    return out


@dataclass
class _Acc:
    mode: str
    trials: int = 0
    s1: np.ndarray | None = None  # per-entry sum of deltas
    s2: np.ndarray | None = None  # per-entry sum of squares
    v1: float = 0.0  # sum over trials of the per-trial statistic
    v2: float = 0.0  # sum of its squares

    def add(self, d: np.ndarray):
        if self.s1 is None:
            self.s1 = np.zeros(d.shape[1])
            self.s2 = np.zeros(d.shape[1])
        self.trials += d.shape[0]
        self.s1 += d.sum(axis=0)
        sq = d * d
        self.s2 += sq.sum(axis=0)
        v = sq.sum(axis=1) if self.mode == "rowsum" else sq.mean(axis=1)
        self.v1 += float(v.sum())
        self.v2 += float((v * v).sum())

    def summary(self) -> dict:
        N = self.trials
        mean_j = self.s1 / N
        var_j = (self.s2 - N * mean_j ** 2) / (N - 1)
        mse_v = self.v1 / N
        se = math.sqrt(max(self.v2 / N - mse_v ** 2, 0.0) / (N - 1))
        agg = np.sum if self.mode == "rowsum" else np.mean
        return {"mse_sim": float(mse_v), "var_sim": float(agg(var_j)), "mean_sim": float(np.mean(mean_j)),
                "se_mse": se}


def _run_block(args):
    cfg, gi, pt, b, size = args
    return simulate_block(cfg, pt, block_rng(cfg.seed, gi, b), size)


def _analytic(cfg: ExperimentConfig, pt: dict, element: str) -> float:
    u = make_format(cfg.format).u
    dx, dy = parse_dist(cfg.dist_x), parse_dist(cfg.dist_y)
    k = cfg.kernel
    if k in ("dot", "matvec", "matmul"):
        h = inner_variance(dx.mean, dx.variance, dy.mean, dy.variance, pt["n"], u).variance
        return h * pt["p"] if element.startswith("R") else h
    if k == "trisolve":
        st = trisolve_variances(pt["n"], pt["m"], u)
        return float(st.var_dx[int(element[1:]) - 1])
    st = lu_variances(pt["n"], pt["m"], u)
    f = element[0]
    i, j = (map(int, element[2:-1].split(","))) if "[" in element else (int(element[1]), int(element[2]))
    return float(st.entry(f, i, j))


@dataclass
class MseReport:
    """Rows of simulated versus predicted error statistics."""

    config: dict
    seed: int
    columns: tuple
    rows: list

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        buf.write(f"# config: {json.dumps(self.config, sort_keys=True)}\n")
        buf.write(f"# seed: {self.seed}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_cell(row.get(c)) for c in self.columns])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    def column(self, name: str) -> list:
        return [r.get(name) for r in self.rows]

    def where(self, **kw) -> list[dict]:
        return [r for r in self.rows if all(r.get(k) == v for k, v in kw.items())]


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction):
        return repr(float(v))
    return str(v)


def mc_mse(cfg: ExperimentConfig, panel: str = "") -> MseReport:
    """Simulate every grid point of ``cfg`` and compare with the analytic predictions."""
    cfg.validate()
    u = make_format(cfg.format).u
    cols = MSE_COLUMNS + (BOUND_COLS if cfg.bounds and cfg.kernel == "dot" else ())
    rows = []
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        for gi, pt in enumerate(cfg.points()):
            nblocks = -(-cfg.trials // cfg.block)
            jobs = [(cfg, gi, pt, b, min(cfg.block, cfg.trials - b * cfg.block)) for b in range(nblocks)]
            try:
                results = pool.map(_run_block, jobs) if pool else map(_run_block, jobs)
                accs: dict[str, _Acc] = {}
                for res in results:  # merged in block order
                    for name, (d, mode) in res.items():
                        accs.setdefault(name, _Acc(mode)).add(d)
            except (OverflowError, ZeroDivisionError, ValueError) as exc:
                raise type(exc)(f"{cfg.kernel} at {pt}: {exc}") from exc
            for name, acc in accs.items():
                summ = acc.summary()
                ana = _analytic(cfg, pt, name)
                row = {"panel": panel, "kernel": cfg.kernel, "format": cfg.format, "dist_x": str(parse_dist(cfg.dist_x)),
                       "dist_y": str(parse_dist(cfg.dist_y)), "n": pt.get("n"), "m": pt.get("m"), "p": pt.get("p"),
                       "element": name, "trials": cfg.trials, "seed": cfg.seed, **summ, "analytic": ana,
                       "ratio": summ["mse_sim"] / ana if ana > 0 else None}
                if cfg.kernel in ("trisolve", "lu"):
                    row["dist_x"] = row["dist_y"] = "wishart"
                if cfg.bounds and cfg.kernel == "dot":
                    br = bound_report(pt["n"], u, cfg.dist_x, cfg.dist_y, BoundParams(cfg.lam, cfg.zeta, cfg.eta))
                    row.update({c: getattr(br, c) for c in BOUND_COLS})
                rows.append(row)
    finally:
        if pool:
            pool.shutdown()
    return MseReport(asdict(cfg), cfg.seed, cols, rows)


def corollary_coverage(n: int, etas=(0.5, 0.1, 0.01), fmt="fp32", dist="uniform:0,1", *, trials: int = 10000,
                       block: int = 1000, seed: int = DEFAULT_SEED) -> list[dict]:
    """Fraction of inner-product trials whose ``|s_hat - s|`` exceeds the Chebyshev bound for each ``eta``."""
    from .bounds import corollary_bound

    u = make_format(fmt).u
    d = parse_dist(dist)
    errs = []
    for b in range(-(-trials // block)):
        g = block_rng(seed, 0, b)
        size = min(block, trials - b * block)
        errs.append(np.abs(K.rounded_dot(d.sample(g, (size, n)), d.sample(g, (size, n)), fmt).delta))
    err = np.concatenate(errs)
    out = []
    for eta in etas:
        c = corollary_bound(n, u, eta, d, d)
        rate = float(np.mean(err > c))
        out.append({"eta": eta, "bound": c, "violation_rate": rate, "se": math.sqrt(eta * (1 - eta) / trials),
                    "trials": trials, "n": n})
    return out


# ---------------------------------------------------------------------------
# dependent-input probe
# ---------------------------------------------------------------------------

@dataclass
class ProbeResult:
    """Running error variance of a long inner product and delta histograms."""

    checkpoints: np.ndarray
    var_sim: np.ndarray
    mse_sim: np.ndarray
    analytic: np.ndarray
    hist_early: tuple
    hist_late: tuple
    n_total: int
    dependent: bool
    trials: int
    overflow_at: int | None = None

    @property
    def ratio(self) -> np.ndarray:
        return self.var_sim / self.analytic

    def window_ratio(self, lo: int, hi: int) -> float:
        """Median ratio over checkpoints ``lo <= i <= hi``."""
        sel = (self.checkpoints >= lo) & (self.checkpoints <= hi)
        if not sel.any():
            raise ValueError(f"no checkpoints in [{lo}, {hi}]")
        return float(np.median(self.ratio[sel]))

    @property
    def early_ratio(self) -> float:
        return self.window_ratio(1, self.n_total // 100)

    @property
    def late_ratio(self) -> float:
        return self.window_ratio(self.n_total // 10, self.n_total)

    def rows(self, panel: str = "") -> list[dict]:
        return [{"panel": panel, "i": int(i), "var_sim": float(v), "mse_sim": float(e), "analytic": float(a),
                 "ratio": float(v / a)} for i, v, e, a in zip(self.checkpoints, self.var_sim, self.mse_sim, self.analytic)]

    def histogram_rows(self) -> list[dict]:
        out = []
        for window, (lo, hi, emp, ana) in (("early", self.hist_early), ("late", self.hist_late)):
            for a, b, e, f in zip(lo, hi, emp, ana):
                out.append({"window": window, "bin_left": float(a), "bin_right": float(b),
                            "empirical_density": float(e), "analytic_density": float(f)})
        return out


def model_validity_probe(n_total: int = 10**6, checkpoint_stride: int = 10**4, fmt="fp32", rng=None, *,
                         trials: int = 1000, dependent: bool = True, hist_trials: int = 8, bins: int = 64,
                         chunk: int = 10**4) -> ProbeResult:
    """Accumulate ``sum x_i y_i`` left to right and track the error variance across trials.

    With ``dependent=True`` the inputs are ``x_i ~ N(0,1)`` and ``y_i = x_i h``
    with one ``h ~ N(0,1)`` per trial; otherwise ``y_i`` is drawn independently.
    The prediction uses the inner-product variance formula with the product
    moments ``E[(x y)^2]`` and ``E[x_j y_j x_k y_k]`` of the chosen inputs
    (3 and 1 when dependent, 1 and 0 when independent).
    """
    from .delta import delta_histogram

    if checkpoint_stride < 1 or n_total < checkpoint_stride:
        raise ValueError("need 1 <= checkpoint_stride <= n_total")
    fmt = make_format(fmt)
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(DEFAULT_SEED if rng is None else rng)
    r = rounder(fmt)
    s = fmt.u ** 2 / 6
    tau_eff, kappa_eff = (3.0, 1.0) if dependent else (1.0, 0.0)
    h = rng.standard_normal((trials, 1))
    acc = np.zeros(trials)
    exact = np.zeros(trials)
    cps, vs, ms, an = [], [], [], []
    early_hi, late_lo = n_total // 100, n_total // 10
    early_d, late_d = [], []
    H = min(hist_trials, trials)
    overflow_at = None
    chunk = min(chunk, checkpoint_stride) if checkpoint_stride % min(chunk, checkpoint_stride) == 0 else math.gcd(chunk, checkpoint_stride)
    i = 0
    try:
        while i < n_total:
            c = min(chunk, n_total - i)
            x = r(rng.standard_normal((trials, c))).reshape(trials, c)
            y = r(x * h if dependent else rng.standard_normal((trials, c))).reshape(trials, c)
            pe = np.ascontiguousarray((x * y).T)
            p = r(pe).reshape(pe.shape)
            dbuf = np.empty((c, H))
            for k in range(c):
                pre = acc + p[k]
                acc = r(pre)
                exact += pe[k]
                with np.errstate(invalid="ignore", divide="ignore"):
                    dbuf[k] = acc[:H] / pre[:H] - 1.0
            idx = i + 1 + np.arange(c)
            for sel, store in ((idx <= early_hi, early_d), (idx > late_lo, late_d)):
                if sel.any():
                    d = dbuf[sel].ravel()
                    store.append(d[np.isfinite(d)])
            i += c
            if i % checkpoint_stride == 0 or i == n_total:
                d = acc - exact
                cps.append(i)
                vs.append(float(d.var(ddof=1)))
                ms.append(float((d * d).mean()))
                an.append(hbar_fast(tau_eff, kappa_eff, i, s))
    except OverflowError:
        overflow_at = i
    cat = lambda L: np.concatenate(L) if L else np.empty(0)  # noqa: E731
    return ProbeResult(np.array(cps), np.array(vs), np.array(ms), np.array(an),
                       delta_histogram(cat(early_d), fmt.u, bins), delta_histogram(cat(late_d), fmt.u, bins),
                       n_total, dependent, trials, overflow_at)


# ---------------------------------------------------------------------------
# zero-forcing / least-squares normal equations
# ---------------------------------------------------------------------------

PIPELINE_COLUMNS = ("stage", "element", "m", "n", "format", "trials", "seed", "mse_sim", "var_sim", "mean_sim",
                    "se_mse", "analytic", "ratio")


def zf_ls_pipeline(m: int, n: int, fmt="fp32", rng=None, *, trials: int = 10000, block: int = 1000,
                   seed: int = DEFAULT_SEED) -> MseReport:
    """Solve ``H^T H x = H^T z`` through rounded ``A = H^T H``, ``c = H^T z``, LU, forward and back solves.

    Each stage is measured locally (exact arithmetic on that stage's own
    rounded inputs).  The two solves are also measured end to end against
    the same pipeline run in double precision.  ``rng`` may be a seed; it
    overrides ``seed``.
    """
    if not m > n + 3:
        raise ValueError(f"m must exceed n+3 for LU (n={n}, m={m})")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if rng is not None and not isinstance(rng, np.random.Generator):
        seed = int(rng)
    fmtf = make_format(fmt)
    u = fmtf.u
    s = sigma2_exact(u)
    accs: dict[str, _Acc] = {}

    def add(name, d, mode="pool"):
        accs.setdefault(name, _Acc(mode)).add(d.reshape(d.shape[0], -1))

    off = ~np.eye(n, dtype=bool)
    for b in range(-(-trials // block)):
        size = min(block, trials - b * block)
        g = block_rng(seed, 0, b)
        H = g.standard_normal((size, m, n))
        z = g.standard_normal((size, m))
        Ht = np.swapaxes(H, -1, -2)
        A = K.rounded_matmul(Ht, H, fmtf)
        add("A_offdiag", A.delta[:, off])
        add("A_diag", A.delta[:, np.arange(n), np.arange(n)])
        c = K.rounded_matvec(Ht, z, fmtf)
        add("c", c.delta)
        lu = K.rounded_lu_doolittle(A.value, fmtf)
        for f, i, j in _lu_elements(n):
            d = (lu.dU if f == "u" else lu.dL)[:, i - 1, j - 1]
            add(_element_name(f, i, j), d)
        y = K.rounded_forward_subst(lu.L, c.value, fmtf)
        add("y_local", y.delta)
        x = K.rounded_back_subst(lu.U, y.value, fmtf)
        add("x_local", x.delta)
        # end to end against the same pipeline in double precision
        Le, Ue = lu.L_exact, lu.U_exact
        if not fmtf.is_carrier:
            Le, Ue = K.exact_reference("lu", A.exact)
        ye = K.exact_reference("trisolve", Le, c.exact)
        xe = K.exact_reference("backsolve", Ue, ye)
        add("y_e2e", y.value - ye)
        add("x_e2e", x.value - xe)

    hb_off = float(hbar_exact(1, 0, m, s))
    hb_diag = float(hbar_exact(3, 1, m, s))
    st = lu_variances(n, m, u)
    analytic = {"A_offdiag": hb_off, "A_diag": hb_diag, "c": hb_off}
    for f, i, j in _lu_elements(n):
        analytic[_element_name(f, i, j)] = float(st.entry(f, i, j))
    rows = []
    for name, acc in accs.items():
        summ = acc.summary()
        ana = analytic.get(name)
        rows.append({"stage": _stage_of(name), "element": name, "m": m, "n": n, "format": fmtf.name,
                     "trials": trials, "seed": seed, **summ, "analytic": ana,
                     "ratio": summ["mse_sim"] / ana if ana else None})
    cfg = {"experiment": "pipeline", "m": m, "n": n, "format": fmtf.name, "trials": trials, "block": block, "seed": seed}
    return MseReport(cfg, seed, PIPELINE_COLUMNS, rows)


def _stage_of(name: str) -> str:
    if name.startswith("A_"):
        return "matmul"
    if name == "c":
        return "matvec"
    if name.startswith(("u", "l")):
        return "lu"
    return "forward_solve" if name.startswith("y") else "back_solve"


# ---------------------------------------------------------------------------
# figure datasets
# ---------------------------------------------------------------------------

FIGURES = (1, 2, 3, 6, 8, 9, 10)
FIG1_DISTS = ("uniform:0,1", "uniform:-1,1", "gaussian:0,1", "gaussian:1,1")


def _fig_configs(fig_id: int, ov: dict) -> list[tuple[str, ExperimentConfig]]:
    base = {"trials": 10000, "seed": DEFAULT_SEED, "format": "fp32"}
    base.update({k: v for k, v in ov.items() if k in ("trials", "seed", "format", "block", "workers", "order")})
    if fig_id == 1:
        ng = ov.get("n_grid", [10, 100, 1000, 10000])
        return [(d, ExperimentConfig(kernel="dot", dist_x=d, dist_y=d, n_grid=ng, **base))
                for d in ov.get("dists", FIG1_DISTS)]
    if fig_id == 2:
        ng = ov.get("n_grid", [10, 100, 1000, 10000])
        return [(d, ExperimentConfig(kernel="dot", dist_x=d, dist_y=d, n_grid=ng, bounds=True,
                                     lam=ov.get("lam", 1.0), zeta=ov.get("zeta", 1e-16), eta=ov.get("eta", 0.1), **base))
                for d in ov.get("dists", ("uniform:0,1", "uniform:-1,1"))]
    if fig_id == 3:
        ng = ov.get("n_grid", [10, 100, 1000])
        b = {**base}
        b.pop("format")
        return [(f, ExperimentConfig(kernel="dot", format=f, dist_x="gaussian:0,1", dist_y="gaussian:0,1", n_grid=ng, **b))
                for f in ov.get("formats", ("fp16", "bfloat16"))]
    if fig_id == 8:
        d = ov.get("dist", "uniform:0,1")
        mk = lambda m, n, p: ExperimentConfig(kernel="matmul", dist_x=d, dist_y=d, m_grid=m, n_grid=n, p_grid=p, **base)  # noqa: E731
        return [("vs_n", mk([10], ov.get("n_grid", [10, 100, 1000]), [10])),
                ("vs_p", mk([10], [10], ov.get("p_grid", [10, 30, 100]))),
                ("vs_m", mk(ov.get("m_grid", [10, 20, 50, 100]), [10], [10]))]
    if fig_id in (9, 10):
        kern = "trisolve" if fig_id == 9 else "lu"
        return [("vs_m", ExperimentConfig(kernel=kern, n_grid=[5], m_grid=ov.get("m_grid", [50, 200, 1050]), **base)),
                ("vs_n", ExperimentConfig(kernel=kern, n_grid=ov.get("n_grid", [3, 5, 10, 20]), m_grid=[1050], **base))]
    raise ValueError(f"unknown figure id {fig_id}; expected one of {FIGURES}")


PROBE_COLUMNS = ("panel", "i", "var_sim", "mse_sim", "analytic", "ratio")


def reproduce_figure(fig_id: int, overrides: dict | None = None) -> MseReport:
    """Dataset behind one figure at desk scale; ``overrides`` adjusts trials, seed and grids."""
    ov = dict(overrides or {})
    fig_id = int(fig_id)
    if fig_id == 6:
        seed = ov.get("seed", DEFAULT_SEED)
        kw = {"n_total": ov.get("n_total", 10**6), "checkpoint_stride": ov.get("checkpoint_stride", 10**4),
              "fmt": ov.get("format", "fp32"), "trials": ov.get("trials", 1000)}
        rows = []
        for panel, dep in (("dependent", True), ("independent", False)):
            res = model_validity_probe(rng=block_rng(seed, int(dep), 0), dependent=dep, **kw)
            rows += res.rows(panel)
        return MseReport({"figure": 6, "seed": seed, **kw}, seed, PROBE_COLUMNS, rows)
    rows = []
    cfgs = _fig_configs(fig_id, ov)
    for panel, cfg in cfgs:
        rows += mc_mse(cfg, panel=panel).rows
    cols = MSE_COLUMNS + (BOUND_COLS if fig_id == 2 else ())
    meta = {"figure": fig_id, "overrides": ov, "panels": {p: asdict(c) for p, c in cfgs}}
    return MseReport(meta, cfgs[0][1].seed, cols, rows)


__all__ = [
    "DEFAULT_SEED", "ExperimentConfig", "corollary_coverage", "KERNELS", "PROBE_COLUMNS", "FIGURES", "MseReport", "ProbeResult", "block_rng", "mc_mse",
    "model_validity_probe", "reproduce_figure", "simulate_block", "zf_ls_pipeline",
]
