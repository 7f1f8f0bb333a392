"""Classical Fisher information for a fixed POVM: direct evaluation, the
variational form with moment operators X_j = sum_x D(x)^j Pi_x, the optimal
estimator coefficients, and the alternating optimizer over input states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ValidationError
from .operators import (
    DensityMatrix,
    HermitianOperator,
    Povm,
    PureState,
    QuantumChannel,
    channel_adjoint_apply,
    channel_apply,
    commutator,
    hermitian_part,
    max_eigvec,
)
from .optimizer import (
    IterationRecord,
    OptimizationResult,
    OptimizerConfig,
    _real_expectation,
    _run_restarts,
)
from .sld import hermitian_eig, is_irreducible

DEFAULT_EPS_PROB = 1e-12


@dataclass(frozen=True)
class EstimatorCoefficients:
    """One real coefficient per POVM outcome, in parameter units."""

    values: np.ndarray
    labels: tuple

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or len(v) != len(self.labels):
            raise ValidationError("need exactly one coefficient per outcome label")
        if not np.all(np.isfinite(v)):
            raise ValidationError("estimator coefficients must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "labels", tuple(self.labels))


@dataclass(frozen=True)
class OutcomeStatistics:
    """Outcome probabilities p(x) = Tr{rho Pi_x} and their parameter
    derivatives dp(x) = Tr{-i[H, rho] Pi_x}."""

    probs: np.ndarray
    dprobs: np.ndarray
    labels: tuple

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        dp = np.array(self.dprobs, dtype=float)
        if p.shape != dp.shape or p.ndim != 1:
            raise ValidationError("probs and dprobs must be aligned vectors")
        if abs(float(p.sum()) - 1.0) > 1e-8:
            raise ValidationError(f"probabilities sum to {p.sum()}, not 1")
        if abs(float(dp.sum())) > 1e-8:
            raise ValidationError(f"probability derivatives sum to {dp.sum()}, not 0")
        p.setflags(write=False)
        dp.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "dprobs", dp)
        object.__setattr__(self, "labels", tuple(self.labels))


def outcome_statistics(rho: DensityMatrix, h: HermitianOperator, povm: Povm) -> OutcomeStatistics:
    if rho.dim != povm.dim or rho.dim != h.dim:
        raise ValidationError(
            f"dimension mismatch: rho {rho.dim}, H {h.dim}, POVM {povm.dim}"
        )
    drho = -1j * commutator(h.matrix, rho.matrix)
    probs = np.array([float(np.real(np.trace(rho.matrix @ e))) for e in povm.elements])
    dprobs = np.array([float(np.real(np.trace(drho @ e))) for e in povm.elements])
    return OutcomeStatistics(probs, dprobs, povm.labels)


def classical_fi(stats: OutcomeStatistics, eps_prob: float = DEFAULT_EPS_PROB) -> float:
    """Sum of dp^2/p over the numerical support {p > eps_prob}."""
    on = stats.probs > eps_prob
    if not np.any(on):
        return 0.0
    return float(np.sum(stats.dprobs[on] ** 2 / stats.probs[on]))


def optimal_d(rho: DensityMatrix, h: HermitianOperator, povm: Povm,
              eps_prob: float = DEFAULT_EPS_PROB) -> EstimatorCoefficients:
    """Optimal coefficients D(x) = dp(x)/p(x) on the support, 0 elsewhere."""
    stats = outcome_statistics(rho, h, povm)
    values = np.zeros_like(stats.probs)
    on = stats.probs > eps_prob
    values[on] = stats.dprobs[on] / stats.probs[on]
    return EstimatorCoefficients(values, povm.labels)


def x_moment(d: EstimatorCoefficients, povm: Povm, j: int) -> HermitianOperator:
    """Moment operator sum_x D(x)^j Pi_x for j in {1, 2}."""
    if j not in (1, 2):
        raise ValidationError(f"moment order must be 1 or 2, got {j}")
    if d.labels != povm.labels:
        raise ValidationError("estimator labels do not match the POVM")
    out = np.zeros((povm.dim, povm.dim), dtype=complex)
    for c, e in zip(d.values, povm.elements):
        out += (c ** j) * e
    return HermitianOperator(hermitian_part(out))


def _cfi_operator(d: EstimatorCoefficients, h: HermitianOperator, povm: Povm) -> HermitianOperator:
    x1 = x_moment(d, povm, 1)
    x2 = x_moment(d, povm, 2)
    op = -x2.matrix + 2j * commutator(h.matrix, x1.matrix)
    return HermitianOperator(hermitian_part(op))


def cfi_objective(psi: PureState, d: EstimatorCoefficients, ch: QuantumChannel,
                  h: HermitianOperator, povm: Povm) -> float:
    """<psi| Lambda^dag(-X_2 + 2i[H, X_1]) |psi>."""
    return _real_expectation(psi, channel_adjoint_apply(ch, _cfi_operator(d, h, povm)))


def optimize_fixed_measurement(ch: QuantumChannel, h: HermitianOperator, povm: Povm,
                               cfg: OptimizerConfig = OptimizerConfig()) -> OptimizationResult:
    """Maximize the classical Fisher information of a fixed POVM over input
    probe states, alternating between the optimal estimator coefficients
    and a maximum-eigenvector state update."""
    if ch.dim_out != h.dim or povm.dim != h.dim:
        raise ValidationError("generator, POVM and channel output dimensions must match")

    def stepper(psi_n, n):
        rho_n = channel_apply(ch, psi_n.projector())
        stats = outcome_statistics(rho_n, h, povm)
        f_n = classical_fi(stats)
        d = optimal_d(rho_n, h, povm)
        m = channel_adjoint_apply(ch, _cfi_operator(d, h, povm))
        psi_next, degenerate = max_eigvec(m, cfg.eps_deg)
        lam = hermitian_eig(HermitianOperator(rho_n.matrix)).eigenvalues
        rank = int(np.count_nonzero(lam > cfg.eps_rank * max(lam[-1], np.finfo(float).tiny)))
        record = IterationRecord(
            n=n,
            f=f_n,
            psi=psi_n,
            degenerate_step=degenerate,
            sld_rank_deficit=rho_n.dim - rank,
            irreducible=is_irreducible(rho_n, h, cfg.eps_deg),
        )
        return psi_next, record

    return _run_restarts(ch.dim_in, cfg, stepper)
