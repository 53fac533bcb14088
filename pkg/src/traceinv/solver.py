"""Dataset recovery from a reconstruction problem.

Three routes:

* ``solve_n1`` -- closed form for a single instance: dividing the two
  epoch-0 equations eliminates the Z factor and yields x directly, then y
  follows from one back-substitution.
* ``solve`` -- damped least squares for general n.  The core is a scaled
  trust-region Levenberg-Marquardt iteration (column-norm variable
  scaling, radius managed by the gain ratio, step from the SVD of the
  scaled Jacobian), restarted from multiple points because the squared
  residual landscape has many local minima.
* ``verify_reconstruction`` -- the independent check: retrain on the
  recovered dataset and compare the resulting trace epoch by epoch.

``match_solutions`` pairs a recovered dataset against a reference one;
the residual system is invariant under any simultaneous permutation of
the (x_i, y_i) pairs, so recovery is only identifiable up to such a
permutation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .model import Dataset, Params, TrainConfig, train
from .system import InsufficientTraceError, ReconstructionProblem, jacobian, residuals


class DegenerateTraceError(ValueError):
    """The closed-form division is undefined because b never moved."""


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances, damping, and multi-start policy for ``solve``.

    ``residual_tolerance`` is on the max-norm of the residual vector; a
    result counts as converged only below it.  ``damping_init`` seeds the
    initial trust radius (the radius of the first damped step).  Start
    points: ``initial_guess`` if given, else (x_0=0.5, all else 0); the
    remaining ``multistart_count - 1`` starts draw x uniformly from
    [0, 1] and y uniformly from [-0.9, 0.9] using ``seed``.
    ``box_bounds = (lo, hi)`` clips every trial point into the box.
    """

    max_iterations: int = 200
    residual_tolerance: float = 1e-10
    step_tolerance: float = 1e-12
    damping_init: float = 1e-3
    multistart_count: int = 16
    seed: int = 0
    box_bounds: tuple | None = None
    allow_underdetermined: bool = False
    initial_guess: np.ndarray | None = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        for name in ("residual_tolerance", "step_tolerance", "damping_init"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.multistart_count < 1:
            raise ValueError("multistart_count must be >= 1")


@dataclass
class ReconstructionResult:
    """Recovered dataset plus convergence diagnostics."""

    recovered: Dataset
    residual_norm: float
    iterations: int
    converged: bool
    starts_tried: int


@dataclass
class MatchReport:
    """Best pairing of recovered vs. reference instances.

    ``pairing[i]`` is the reference index matched to recovered instance i;
    ``max_abs_error`` is the largest |coordinate difference| under that
    pairing.
    """

    pairing: tuple
    max_abs_error: float


@dataclass
class VerifyReport:
    """Per-epoch deviation between an observed trace and a retrained one."""

    dw: np.ndarray
    db: np.ndarray
    threshold: float
    passed: bool

    @property
    def max_deviation(self):
        return float(max(self.dw.max(), self.db.max()))


def _trust_region_step(U, s, Vt, r, delta):
    """Min ||J d + r|| subject to ||d|| <= delta, given the SVD of J.

    Returns (d, lam) where lam is the implied damping parameter (0 when
    the Gauss-Newton step already fits in the radius).
    """
    beta = U.T @ r
    cutoff = s[0] * 1e-14 if s[0] > 0 else np.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        coef = np.where(s > cutoff, beta / np.where(s > cutoff, s, 1.0), 0.0)
    d_gn = -Vt.T @ coef
    if np.linalg.norm(d_gn) <= delta:
        return d_gn, 0.0

    def step_norm(lam):
        return float(np.sqrt(np.sum((s * beta / (s**2 + lam)) ** 2)))

    lo, hi = 0.0, 1.0
    while step_norm(hi) > delta and hi < 1e300:
        hi *= 10.0
    lam = hi / 2.0
    for _ in range(60):
        q = step_norm(lam)
        if abs(q - delta) <= 1e-10 * delta:
            break
        if q > delta:
            lo = lam
        else:
            hi = lam
        dq = -np.sum(s**2 * beta**2 / (s**2 + lam) ** 3) / max(q, 1e-300)
        if dq != 0.0:
            lam_new = lam - (q - delta) * q / (delta * dq)
        else:
            lam_new = (lo + hi) / 2.0
        lam = lam_new if lo < lam_new < hi else (lo + hi) / 2.0
    return -Vt.T @ (s * beta / (s**2 + lam)), lam


def _levenberg_marquardt(fun, jac, z0, cfg):
    """Scaled trust-region LM iteration from a single start point.

    Returns (z, r, iterations, converged) where converged means the
    residual max-norm reached cfg.residual_tolerance.
    """
    lo = hi = None
    if cfg.box_bounds is not None:
        lo, hi = (np.asarray(v, dtype=float) for v in cfg.box_bounds)

    def clip(z):
        return np.clip(z, lo, hi) if lo is not None else z

    z = clip(np.asarray(z0, dtype=float).copy())
    r = fun(z)
    cost = float(r @ r)
    J = jac(z)
    scale = np.linalg.norm(J, axis=0)
    scale[scale == 0.0] = 1.0
    delta = None

    it = 0
    while it < cfg.max_iterations:
        if np.max(np.abs(r)) <= cfg.residual_tolerance:
            return z, r, it, True
        it += 1
        Jh = J / scale
        U, s, Vt = np.linalg.svd(Jh, full_matrices=False)
        if s[0] == 0.0:
            return z, r, it, False  # zero Jacobian, nowhere to go
        if delta is None:
            # radius of the first step at the configured initial damping
            mu0 = cfg.damping_init * s[0] ** 2
            beta = U.T @ r
            delta = float(np.linalg.norm(s * beta / (s**2 + mu0)))
            if delta == 0.0:
                delta = 1.0
        if np.max(np.abs(Jh.T @ r)) <= 1e-14 * max(1.0, np.sqrt(cost)):
            return z, r, it, False  # stationary but not a root
        accepted = False
        for _ in range(30):
            dh, lam = _trust_region_step(U, s, Vt, r, delta)
            z_new = clip(z + dh / scale)
            r_new = fun(z_new)
            cost_new = float(r_new @ r_new)
            pred = float(np.linalg.norm(Jh @ dh) ** 2 + 2.0 * lam * np.linalg.norm(dh) ** 2)
            rho = (cost - cost_new) / pred if pred > 0 else -1.0
            if rho < 0.25:
                delta = 0.25 * float(np.linalg.norm(dh))
            elif rho > 0.75 and lam > 0.0:
                delta = min(2.0 * delta, 1e10)
            if rho > 1e-4:
                accepted = True
                break
            if delta <= 1e-13 * max(1.0, float(np.linalg.norm(scale * z))):
                return z, r, it, False
        if not accepted:
            return z, r, it, False
        step = z_new - z
        stagnant = (cost - cost_new) <= 1e-14 * cost and pred <= 1e-14 * cost
        z, r, cost = z_new, r_new, cost_new
        J = jac(z)
        scale = np.maximum(scale, np.linalg.norm(J, axis=0))
        if np.max(np.abs(r)) <= cfg.residual_tolerance:
            return z, r, it, True
        if stagnant or np.linalg.norm(step) <= cfg.step_tolerance * (np.linalg.norm(z) + cfg.step_tolerance):
            return z, r, it, False
    return z, r, it, False


def _start_points(problem, cfg):
    """Deterministic sequence of start vectors for the multi-start loop."""
    n = problem.n
    rng = np.random.default_rng(cfg.seed)
    for k in range(cfg.multistart_count):
        if k == 0:
            if cfg.initial_guess is not None:
                yield np.asarray(cfg.initial_guess, dtype=float).copy()
            else:
                z0 = np.zeros(2 * n)
                z0[0] = 0.5
                yield z0
        else:
            yield np.concatenate(
                [rng.uniform(0.0, 1.0, n), rng.uniform(-0.9, 0.9, n)]
            )


def solve(problem, cfg=SolverConfig()):
    """Recover the dataset behind ``problem`` by multi-start damped least
    squares.

    Requires at least n+1 trace epochs (2n equations) unless
    ``cfg.allow_underdetermined`` is set.  Stops at the first start whose
    residual max-norm reaches ``cfg.residual_tolerance``; if none does,
    returns the best start found with ``converged=False`` rather than
    raising.  Identical (problem, cfg) always yields identical results.
    """
    n = problem.n
    if not problem.is_determined and not cfg.allow_underdetermined:
        raise InsufficientTraceError(
            f"need at least {n + 1} epochs for {2 * n} unknowns, trace has "
            f"{problem.trace.epochs}; set allow_underdetermined to solve anyway"
        )
    fun = lambda z: residuals(z, problem)
    jac = lambda z: jacobian(z, problem)

    best = None  # (residual_norm, start_index, z, iterations)
    starts_tried = 0
    for k, z0 in enumerate(_start_points(problem, cfg)):
        starts_tried += 1
        z, r, iterations, converged = _levenberg_marquardt(fun, jac, z0, cfg)
        rnorm = float(np.max(np.abs(r)))
        if best is None or rnorm < best[0]:
            best = (rnorm, k, z, iterations)
        if converged:
            return ReconstructionResult(
                recovered=Dataset(z[:n].copy(), z[n:].copy()),
                residual_norm=rnorm,
                iterations=iterations,
                converged=True,
                starts_tried=starts_tried,
            )
    rnorm, _, z, iterations = best
    return ReconstructionResult(
        recovered=Dataset(z[:n].copy(), z[n:].copy()),
        residual_norm=rnorm,
        iterations=iterations,
        converged=False,
        starts_tried=starts_tried,
    )


def solve_n1(problem, residual_tolerance=1e-10):
    """Closed-form recovery for a single-instance dataset.

    From the first transition, with t_w = n/(2 eta) (w0 - w1) and
    t_b = n/(2 eta) (b0 - b1):

        x = t_w / t_b        (the Z factors cancel)
        y = T(x) - t_b / (1 - T(x)^2)

    Later transitions act as consistency checks: the reported residual
    norm covers the whole system.  Raises DegenerateTraceError when
    |t_b| < 1e-14 (the bias never moved, so the division is undefined).
    """
    if problem.n != 1:
        raise ValueError(f"closed form applies to n=1 only, problem has n={problem.n}")
    tr = problem.trace
    c = 1.0 / (2.0 * tr.eta)
    t_w = c * (tr.ws[0] - tr.ws[1])
    t_b = c * (tr.bs[0] - tr.bs[1])
    if abs(t_b) < 1e-14:
        raise DegenerateTraceError(
            "bias did not move between epochs 0 and 1; x is undetermined by division"
        )
    x = t_w / t_b
    T = np.tanh(tr.ws[0] * x + tr.bs[0])
    y = T - t_b / (1.0 - T**2)
    z = np.array([x, y])
    rnorm = float(np.max(np.abs(residuals(z, problem))))
    return ReconstructionResult(
        recovered=Dataset([x], [y]),
        residual_norm=rnorm,
        iterations=0,
        converged=rnorm <= residual_tolerance,
        starts_tried=1,
    )


def match_solutions(recovered, truth):
    """Optimal pairing of recovered instances against reference instances.

    Minimizes the summed |dx| + |dy| over pairings via linear assignment
    and reports the largest coordinate error under the chosen pairing.
    """
    if recovered.n != truth.n:
        raise ValueError(
            f"datasets differ in size: {recovered.n} vs {truth.n}"
        )
    dx = np.abs(recovered.xs[:, None] - truth.xs[None, :])
    dy = np.abs(recovered.ys[:, None] - truth.ys[None, :])
    rows, cols = linear_sum_assignment(dx + dy)
    pairing = tuple(int(cols[np.argwhere(rows == i)[0, 0]]) for i in range(recovered.n))
    max_err = float(np.max(np.maximum(dx[rows, cols], dy[rows, cols])))
    return MatchReport(pairing=pairing, max_abs_error=max_err)


def verify_reconstruction(trace, recovered, threshold=1e-8):
    """Retrain on ``recovered`` from the trace's epoch-0 parameters and
    compare the resulting trace epoch by epoch.

    This is the ground-truth-free success check: a correct reconstruction
    (up to pair permutation) reproduces the observed trace exactly.
    """
    if recovered.n != trace.n:
        raise ValueError(
            f"dataset size {recovered.n} does not match trace metadata n={trace.n}"
        )
    cfg = TrainConfig(
        eta=trace.eta,
        epochs=trace.epochs,
        init=Params(float(trace.ws[0]), float(trace.bs[0])),
    )
    replay = train(recovered, cfg)
    dw = np.abs(replay.ws - trace.ws)
    db = np.abs(replay.bs - trace.bs)
    return VerifyReport(
        dw=dw,
        db=db,
        threshold=threshold,
        passed=bool(dw.max() <= threshold and db.max() <= threshold),
    )
