"""Certify or refute the structural conditions a design must satisfy.

Ground truth is exhaustive subset enumeration on the graph (expansion).
The vector-quantified conditions (RIP-1, the uncertainty-principle
inequality, kernel concentration) are quantified over all of R^p and can
only be falsified by sampling, so those checks are one-sided: a failure is
definitive, a pass means "no violation found". The nullspace property gets
an exact LP-based decision at tiny scale.

Sampling distributions are fixed: supports are uniform without
replacement, sparse magnitudes are uniform in [-1, 1], and dense test
vectors are standard Gaussian; every check derives all randomness from its
(seed, trial-index) pair, so verdicts do not depend on scheduling.

Reports serialize to JSON objects with exactly the fields ``condition``,
``ok``, ``worst_ratio``, ``witness``, ``trials`` and ``seed``. A failing
report carries enough of the witness to re-check the violation standalone
(see :func:`recheck_violation`); a non-finite worst ratio serializes as
null with the exact numerator and denominator kept in the witness.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .design import DesignMatrix
from .errors import CapacityError
from .graphs import BipartiteGraph
from .rng import Stream, derive_seed, gaussians
from .solve import LinearProgram, lp_solve

SLACK = 1e-9  # absolute slack for near-integer / floating comparisons


@dataclass
class VerificationReport:
    condition: str
    ok: bool
    worst_ratio: float | None
    witness: dict | None
    trials: int | None
    seed: int | None

    def to_json_dict(self) -> dict:
        ratio = self.worst_ratio
        if ratio is not None and not math.isfinite(ratio):
            ratio = None
        return {
            "condition": self.condition,
            "ok": self.ok,
            "worst_ratio": ratio,
            "witness": self.witness,
            "trials": self.trials,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def report_from_json_dict(obj: dict) -> VerificationReport:
    try:
        return VerificationReport(
            str(obj["condition"]), bool(obj["ok"]),
            None if obj["worst_ratio"] is None else float(obj["worst_ratio"]),
            obj["witness"], obj["trials"], obj["seed"])
    except KeyError as exc:
        raise ValueError(f"verification report is missing field {exc}") from exc


def _subset_budget(p: int, s: int) -> int:
    return sum(math.comb(p, k) for k in range(1, s + 1))


# ---------------------------------------------------------------------------
# expansion
# ---------------------------------------------------------------------------

def _expansion_scan(g: BipartiteGraph, subsets, eps: float):
    """Shared core: scan subsets, track the minimum of |J| / (d |I|)."""
    masks = [0] * g.p
    for i, nb in enumerate(g.neighbors):
        m = 0
        for j in nb:
            m |= 1 << j
        masks[i] = m
    worst = math.inf
    worst_subset = None
    worst_count = 0
    violated = False
    examined = 0
    for subset in subsets:
        examined += 1
        m = 0
        for i in subset:
            m |= masks[i]
        cnt = m.bit_count()
        ratio = cnt / (g.d * len(subset))
        if ratio < worst:
            worst, worst_subset, worst_count = ratio, tuple(subset), cnt
        if cnt + SLACK < (1.0 - eps) * g.d * len(subset):
            violated = True
            break
    return violated, worst, worst_subset, worst_count, examined


def check_expansion_exhaustive(g: BipartiteGraph, s: int, eps: float,
                               budget: int = 10**7) -> VerificationReport:
    """Exact decision: every left subset of size 1..s must have at least
    (1 - eps) d |I| distinct neighbors. Stops at the first violation."""
    if not 1 <= s <= g.p:
        raise ValueError(f"need 1 <= s <= p, got s={s}, p={g.p}")
    total = _subset_budget(g.p, s)
    if total > budget:
        raise CapacityError(
            f"{total} subsets exceed budget {budget}; use check_expansion_sampled")
    subsets = itertools.chain.from_iterable(
        itertools.combinations(range(g.p), k) for k in range(1, s + 1))
    violated, worst, subset, cnt, examined = _expansion_scan(g, subsets, eps)
    witness = {"s": s, "eps": eps, "p": g.p, "n": g.n, "d": g.d,
               "subset": list(subset), "neighbor_count": cnt}
    return VerificationReport("expansion_exhaustive", not violated, worst,
                              witness, examined, None)


def check_expansion_sampled(g: BipartiteGraph, s: int, eps: float,
                            trials: int, seed: int) -> VerificationReport:
    """One-sided randomized relaxation of the exhaustive check: samples
    uniformly random subsets of sizes 1..s and can only refute."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = Stream(seed)

    def subsets():
        for _ in range(trials):
            k = 1 + rng.below(min(s, g.p))
            yield rng.sample_without_replacement(g.p, k)

    violated, worst, subset, cnt, _ = _expansion_scan(g, subsets(), eps)
    witness = {"s": s, "eps": eps, "p": g.p, "n": g.n, "d": g.d,
               "subset": list(subset), "neighbor_count": cnt}
    return VerificationReport("expansion_sampled", not violated, worst,
                              witness, trials, seed)


# ---------------------------------------------------------------------------
# vector-side sampled checks
# ---------------------------------------------------------------------------

def _sparse_sample(p: int, s: int, seed: int) -> tuple[list[int], np.ndarray]:
    """Uniform support of size s, entries uniform in [-1, 1]."""
    rng = Stream(seed)
    support = rng.sample_without_replacement(p, s)
    gamma = np.zeros(p)
    for i in support:
        gamma[i] = 2.0 * rng.uniform() - 1.0
    return support, gamma


def check_rip1_sampled(X: DesignMatrix, s: int, eps: float,
                       trials: int, seed: int) -> VerificationReport:
    """Sampled check of (1-2 eps) |gamma_S|_1 <= |X gamma_S|_1 <= |gamma_S|_1
    for s-sparse gamma. Records the worst lower ratio."""
    if s > X.p:
        raise ValueError("s cannot exceed p")
    lower = 1.0 - 2.0 * eps
    worst = math.inf
    worst_witness = None
    ok = True
    for t in range(trials):
        support, gamma = _sparse_sample(X.p, s, derive_seed(seed, t))
        num = float(np.abs(X.matvec(gamma)).sum())
        den = float(np.abs(gamma).sum())
        if den == 0.0:
            continue
        ratio = num / den
        if ratio < worst:
            worst = ratio
            worst_witness = {"support": support, "values": [float(gamma[i]) for i in support]}
        if ratio < lower - 1e-12 or ratio > 1.0 + 1e-12:
            ok = False
            worst_witness = {"support": support, "values": [float(gamma[i]) for i in support]}
            worst = ratio
            break
    witness = {"s": s, "eps": eps, **(worst_witness or {})}
    return VerificationReport("rip1_sampled", ok, worst, witness, trials, seed)


def up2_lhs_rhs(X: DesignMatrix, gamma: np.ndarray, s: int) -> tuple[float, float, list[int]]:
    """Evaluate the order-s uncertainty inequality at the worst subset for
    this gamma, the s largest magnitudes: |gamma_S|_1 vs
    2 |X gamma|_1 + 1/2 |gamma_{S^c}|_1."""
    order = np.argsort(-np.abs(gamma), kind="stable")
    top = sorted(int(i) for i in order[:s])
    mass_s = float(sum(abs(gamma[i]) for i in top))
    total = float(np.abs(gamma).sum())
    lhs = mass_s
    rhs = 2.0 * float(np.abs(X.matvec(gamma)).sum()) + 0.5 * (total - mass_s)
    return lhs, rhs, top


def check_up2_sampled(X: DesignMatrix, s: int, trials: int, seed: int) -> VerificationReport:
    """Sampled check of the uncertainty inequality on dense Gaussian
    vectors. For fixed gamma the top-s support maximizes
    |gamma_S|_1 - 1/2 |gamma_{S^c}|_1 over all |S| <= s, so testing it
    covers every subset."""
    if s > X.p:
        raise ValueError("s cannot exceed p")
    worst = 0.0
    worst_witness = None
    ok = True
    for t in range(trials):
        gamma = gaussians(derive_seed(seed, t), X.p)
        lhs, rhs, top = up2_lhs_rhs(X, gamma, s)
        ratio = lhs / rhs if rhs > 0 else math.inf
        if ratio > worst or not math.isfinite(ratio):
            worst = ratio
            worst_witness = {"support": top, "gamma": [float(v) for v in gamma],
                             "lhs": lhs, "rhs": rhs}
        if lhs > rhs + SLACK:
            ok = False
            break
    witness = {"s": s, **(worst_witness or {})}
    return VerificationReport("up2_sampled", ok, worst, witness, trials, seed)


def kernel_basis(X: DesignMatrix, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal kernel basis columns from the SVD, singular values
    below ``tol`` treated as zero."""
    dense = X.to_dense()
    _, svals, vt = np.linalg.svd(dense, full_matrices=True)
    rank = int(np.sum(svals > tol))
    return vt[rank:].T.copy()


def check_kernel_concentration(X: DesignMatrix, s: int, trials: int,
                               seed: int) -> VerificationReport:
    """Sampled check that kernel vectors satisfy
    |gamma_S|_1 <= 1/2 |gamma_{S^c}|_1 at the top-s support. Vacuously ok
    for a trivial kernel."""
    basis = kernel_basis(X)
    if basis.shape[1] == 0:
        return VerificationReport("kernel_concentration", True, 0.0,
                                  {"s": s, "kernel_dim": 0}, 0, seed)
    worst = 0.0
    worst_witness = None
    ok = True
    for t in range(trials):
        coeff = gaussians(derive_seed(seed, t), basis.shape[1])
        gamma = basis @ coeff
        order = np.argsort(-np.abs(gamma), kind="stable")
        top = sorted(int(i) for i in order[:s])
        lhs = float(sum(abs(gamma[i]) for i in top))
        rhs = 0.5 * (float(np.abs(gamma).sum()) - lhs)
        ratio = lhs / rhs if rhs > 0 else math.inf
        if ratio > worst or not math.isfinite(ratio):
            worst = ratio
            worst_witness = {"support": top, "gamma": [float(v) for v in gamma],
                             "lhs": lhs, "rhs": rhs}
        if lhs > rhs + SLACK:
            ok = False
            break
    witness = {"s": s, "kernel_dim": int(basis.shape[1]), **(worst_witness or {})}
    return VerificationReport("kernel_concentration", ok, worst, witness, trials, seed)


# ---------------------------------------------------------------------------
# nullspace property, exact at tiny scale
# ---------------------------------------------------------------------------

def nullspace_property_oracle(X: DesignMatrix, s: int,
                              budget: int = 10**4) -> VerificationReport:
    """Exact decision of the order-s nullspace property.

    For every |S| = s and sign pattern sigma on S, solve the LP
    maximize sigma^T gamma_S subject to X gamma = 0, |gamma_{S^c}|_1 <= 1
    (gamma split into nonnegative parts, the l1 bound written with a slack
    variable). The property holds iff every optimum is < 1 - 1e-9. When the
    columns of S are linearly dependent the LP is unbounded and the
    property fails outright; that case is detected by a rank test first.
    """
    p = X.p
    count = math.comb(p, s) * 2**s
    if count > budget:
        raise CapacityError(f"{count} subset/sign pairs exceed budget {budget}")
    dense = X.to_dense()
    n = X.n
    worst = 0.0
    worst_witness = None
    ok = True
    examined = 0
    for support in itertools.combinations(range(p), s):
        cols = dense[:, support]
        svals = np.linalg.svd(cols, compute_uv=False)
        if svals[-1] <= 1e-10:
            null = np.linalg.svd(cols)[2][-1]
            gamma = np.zeros(p)
            gamma[list(support)] = null
            witness = {"s": s, "support": list(support), "unbounded": True,
                       "gamma": [float(v) for v in gamma]}
            return VerificationReport("nullspace_property", False, math.inf,
                                      witness, examined, None)
        for signs in itertools.product((1.0, -1.0), repeat=s):
            examined += 1
            c = np.zeros(2 * p + 1)
            for pos, i in enumerate(support):
                c[i] = -signs[pos]
                c[p + i] = signs[pos]
            A = np.zeros((n + 1, 2 * p + 1))
            A[:n, :p] = dense
            A[:n, p:2 * p] = -dense
            off = [i for i in range(p) if i not in support]
            for i in off:
                A[n, i] = 1.0
                A[n, p + i] = 1.0
            A[n, 2 * p] = 1.0
            b = np.zeros(n + 1)
            b[n] = 1.0
            res = lp_solve(LinearProgram(c, A, b))
            if res.status == "unbounded":
                witness = {"s": s, "support": list(support), "signs": list(signs),
                           "unbounded": True}
                return VerificationReport("nullspace_property", False, math.inf,
                                          witness, examined, None)
            if res.status != "optimal":
                raise AssertionError(f"unexpected LP status {res.status}")
            value = -res.objective
            if value > worst:
                gamma = res.x[:p] - res.x[p:2 * p]
                worst = value
                worst_witness = {"support": list(support), "signs": list(signs),
                                 "optimum": value, "gamma": [float(v) for v in gamma]}
            if value >= 1.0 - SLACK:
                ok = False
    witness = {"s": s, **(worst_witness or {})}
    return VerificationReport("nullspace_property", ok, worst, witness, examined, None)


# ---------------------------------------------------------------------------
# standalone witness re-check
# ---------------------------------------------------------------------------

def recheck_violation(report: VerificationReport,
                      g: BipartiteGraph | None = None,
                      X: DesignMatrix | None = None) -> float:
    """Re-evaluate a failing report's witness from scratch.

    Returns the violation margin (how far the witnessed quantity sits past
    its bound; > 0 confirms a genuine violation). Raises if the report is
    not a failure or lacks the needed object.
    """
    if report.ok:
        raise ValueError("report is not a violation")
    w = report.witness or {}
    cond = report.condition
    if cond.startswith("expansion"):
        if g is None:
            raise ValueError("expansion recheck needs the graph")
        subset = w["subset"]
        joined = set()
        for i in subset:
            joined.update(g.neighbors[i])
        return (1.0 - w["eps"]) * g.d * len(subset) - len(joined)
    if X is None:
        raise ValueError(f"{cond} recheck needs the design matrix")
    if cond == "rip1_sampled":
        gamma = np.zeros(X.p)
        for i, v in zip(w["support"], w["values"]):
            gamma[i] = v
        num = float(np.abs(X.matvec(gamma)).sum())
        den = float(np.abs(gamma).sum())
        lower = (1.0 - 2.0 * w["eps"]) * den
        return max(lower - num, num - den)
    if cond == "up2_sampled":
        gamma = np.asarray(w["gamma"])
        lhs, rhs, _ = up2_lhs_rhs(X, gamma, w["s"])
        return lhs - rhs
    if cond == "kernel_concentration":
        gamma = np.asarray(w["gamma"])
        top = w["support"]
        lhs = float(sum(abs(gamma[i]) for i in top))
        rhs = 0.5 * (float(np.abs(gamma).sum()) - lhs)
        return lhs - rhs
    if cond == "nullspace_property":
        gamma = np.asarray(w["gamma"])
        support = w["support"]
        if np.max(np.abs(X.matvec(gamma))) > 1e-8:
            return -math.inf  # witness is not a kernel vector; recheck fails
        mass_s = float(sum(abs(gamma[i]) for i in support))
        mass_c = float(np.abs(gamma).sum()) - mass_s
        return mass_s - mass_c + SLACK
    raise ValueError(f"unknown condition {cond!r}")
