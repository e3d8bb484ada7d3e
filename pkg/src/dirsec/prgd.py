"""Product Riemannian gradient descent with Armijo backtracking.

One iteration: project the Euclidean gradient onto the product tangent
space, backtrack a step size alpha until the retracted trial point
achieves sufficient decrease

    f(next) - f(current) <= -(alpha/2) * |grad|^2,

then accept.  Acceptance makes the objective trace non-increasing by
construction and yields the per-step decrease certificate checked by
the tests.

A Problem carries activity masks so restricted variants (fixed phases,
single active block) run through the same loop: inactive components get
a zero gradient and are never moved.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import manifold, secrecy
from .manifold import IteratePoint, TangentVector


@dataclass(frozen=True)
class Problem:
    """A secrecy objective bound to one channel realization.

    ``active_*`` masks freeze components: a frozen component contributes
    zero gradient, so the iterate keeps its initial value there.
    ``pinned_phi1/phi2`` supply those frozen values when the caller
    builds initial points through :meth:`random_point`.
    """

    channels: secrecy.ChannelSet
    cfg: secrecy.SystemConfig
    active_w: bool = True
    active_phi1: bool = True
    active_phi2: bool = True
    pinned_phi1: np.ndarray | None = None
    pinned_phi2: np.ndarray | None = None

    def objective(self, pt: IteratePoint) -> float:
        return secrecy.objective(self.channels, pt, self.cfg)

    def euclidean_gradient(self, pt: IteratePoint) -> tuple[TangentVector, secrecy.GradientWorkspace]:
        grad, ws = secrecy.euclidean_gradient(self.channels, pt, self.cfg)
        if not (self.active_w and self.active_phi1 and self.active_phi2):
            grad = TangentVector(
                grad.xi_blocks if self.active_w else np.zeros_like(grad.xi_blocks),
                grad.psi1 if self.active_phi1 else np.zeros_like(grad.psi1),
                grad.psi2 if self.active_phi2 else np.zeros_like(grad.psi2),
            )
        return grad, ws

    def random_point(self, rng: np.random.Generator) -> IteratePoint:
        """Random feasible start honoring pinned components."""
        cfg = self.cfg
        pt = manifold.random_point(cfg.n_sub, cfg.m_tx, cfg.n_streams,
                                   cfg.n_irs1, cfg.n_irs2, rng)
        phi1 = pt.phi1 if self.pinned_phi1 is None else np.asarray(self.pinned_phi1, dtype=complex)
        phi2 = pt.phi2 if self.pinned_phi2 is None else np.asarray(self.pinned_phi2, dtype=complex)
        return IteratePoint(pt.w_blocks, phi1, phi2)

    def check_point_shapes(self, pt: IteratePoint) -> None:
        cfg = self.cfg
        expect = ((cfg.n_sub, cfg.m_tx, cfg.n_streams),
                  (cfg.n_irs1,), (cfg.n_irs2,))
        got = (pt.w_blocks.shape, pt.phi1.shape, pt.phi2.shape)
        if got != expect:
            raise manifold.DimensionMismatchError(
                f"point shapes {got} do not match config {expect}")


@dataclass(frozen=True)
class OptimizerConfig:
    max_iters: int = 500
    grad_tol: float = 1e-4
    armijo_init: float = 1.0
    armijo_shrink: float = 0.5
    armijo_max_backtracks: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0.0 < self.armijo_shrink < 1.0:
            raise ValueError("armijo_shrink must lie in (0, 1)")
        if not self.armijo_init > 0.0:
            raise ValueError("armijo_init must be positive")


@dataclass
class RunResult:
    """Traces and final state of one descent run.

    ``objective_trace`` has one entry per visited point (length
    iterations_used + 1) and is non-increasing.  ``grad_norm_trace`` is
    aligned with it.  The residual traces record worst-case manifold
    constraint / gradient tangency violations per iteration, feeding
    the purity checks.
    """

    objective_trace: list = field(default_factory=list)
    grad_norm_trace: list = field(default_factory=list)
    step_trace: list = field(default_factory=list)
    final_point: IteratePoint | None = None
    iterations_used: int = 0
    converged: bool = False
    constraint_residual_trace: list = field(default_factory=list)
    tangency_residual_trace: list = field(default_factory=list)

    @property
    def final_objective(self) -> float:
        return self.objective_trace[-1]

    @property
    def final_grad_norm(self) -> float:
        return self.grad_norm_trace[-1]


class LineSearchError(RuntimeError):
    """No backtracking step achieved sufficient decrease.

    ``trials`` lists (alpha, trial objective) pairs in the order tried;
    ``partial_result`` carries the run state up to the failure when the
    failure surfaced through :func:`solve`.
    """

    def __init__(self, message: str, trials=None, partial_result=None):
        super().__init__(message)
        self.trials = trials or []
        self.partial_result = partial_result


def riemannian_gradient(problem: Problem, pt: IteratePoint) -> TangentVector:
    """Tangent-space projection of the (masked) Euclidean gradient."""
    raw, _ = problem.euclidean_gradient(pt)
    return manifold.project_to_tangent(pt, raw)


def _armijo(problem, pt, grad, cfg, f_current, grad_sq):
    alpha = cfg.armijo_init
    trials = []
    for _ in range(cfg.armijo_max_backtracks + 1):
        candidate = manifold.retract(manifold.move(pt, grad, -alpha))
        f_trial = problem.objective(candidate)
        trials.append((alpha, f_trial))
        if f_trial - f_current <= -0.5 * alpha * grad_sq:
            return alpha, candidate, f_trial, trials
        alpha *= cfg.armijo_shrink
    raise LineSearchError(
        f"no sufficient-decrease step within {cfg.armijo_max_backtracks} "
        f"backtracks (grad norm {np.sqrt(grad_sq):.3e})", trials=trials)


def armijo_search(problem: Problem, pt: IteratePoint, grad: TangentVector,
                  cfg: OptimizerConfig) -> tuple[float, IteratePoint]:
    """Largest accepted alpha in {init * shrink^j} and its trial point."""
    f_current = problem.objective(pt)
    grad_sq = manifold.inner(grad, grad)
    alpha, candidate, _, _ = _armijo(problem, pt, grad, cfg, f_current, grad_sq)
    return alpha, candidate


def solve(problem: Problem, init: IteratePoint,
          cfg: OptimizerConfig = OptimizerConfig()) -> RunResult:
    """Descend from ``init`` until grad norm <= grad_tol or max_iters."""
    problem.check_point_shapes(init)
    res = RunResult()
    pt = init
    f = problem.objective(pt)
    res.objective_trace.append(f)
    res.constraint_residual_trace.append(max(pt.constraint_residuals()))

    while True:
        grad = riemannian_gradient(problem, pt)
        gn = manifold.norm(grad)
        res.grad_norm_trace.append(gn)
        res.tangency_residual_trace.append(max(grad.tangency_residuals(pt)))
        if gn <= cfg.grad_tol:
            res.converged = True
            break
        if res.iterations_used >= cfg.max_iters:
            break
        try:
            alpha, pt, f, _ = _armijo(problem, pt, grad, cfg, f, gn * gn)
        except LineSearchError as err:
            err.partial_result = _finish(res, pt)
            raise
        res.step_trace.append(alpha)
        res.objective_trace.append(f)
        res.constraint_residual_trace.append(max(pt.constraint_residuals()))
        res.iterations_used += 1

    return _finish(res, pt)


def _finish(res: RunResult, pt: IteratePoint) -> RunResult:
    res.final_point = pt
    return res


def make_problem(channels: secrecy.ChannelSet, cfg: secrecy.SystemConfig,
                 **masks) -> Problem:
    return Problem(channels=channels, cfg=cfg, **masks)


def restrict(problem: Problem, *, w: bool | None = None,
             phi1: bool | None = None, phi2: bool | None = None) -> Problem:
    """Copy of ``problem`` with some activity masks overridden."""
    kwargs = {}
    if w is not None:
        kwargs["active_w"] = w
    if phi1 is not None:
        kwargs["active_phi1"] = phi1
    if phi2 is not None:
        kwargs["active_phi2"] = phi2
    return replace(problem, **kwargs)
