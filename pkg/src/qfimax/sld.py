"""Symmetric logarithmic derivative solver and quantum Fisher information.

The defining equation (1/2){L, rho} = -i[H, rho] is the single source of
truth; the solver works in rho's eigenbasis and is verified through its
residual rather than any transcribed closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .operators import (
    DensityMatrix,
    HermitianOperator,
    commutator,
    dagger,
    hermitian_eig,
    hermitian_part,
    require_valid,
)


@dataclass(frozen=True)
class SldResult:
    """Solution of (1/2){L, rho} = R.

    rank is the numerical rank of rho; support_dim_deficit = dim - rank.
    residual is the Hilbert-Schmidt norm of (1/2){L, rho} - R restricted
    to the blocks where the equation is solvable (everything except the
    null-null block, where L is set to zero by convention).
    """

    L: HermitianOperator
    rank: int
    support_dim_deficit: int
    residual: float


def solve_sld_rhs(rho: DensityMatrix, r: HermitianOperator, eps_rank: float = 1e-12) -> SldResult:
    """Solve (1/2){X, rho} = R for Hermitian X in rho's eigenbasis.

    Matrix elements with eigenvalue sums below eps_rank * lambda_max are
    in the numerical null-null block and are set to zero.
    """
    require_valid(rho, "density matrix")
    if rho.dim != r.dim:
        raise ValidationError(f"dimension mismatch: rho {rho.dim}, rhs {r.dim}")
    eig = hermitian_eig(HermitianOperator(rho.matrix))
    lam, v = eig.eigenvalues, eig.eigenvectors
    lam_max = float(lam[-1])
    if lam_max <= 0.0:
        raise ValidationError("density matrix has no positive eigenvalue")

    r_eig = dagger(v) @ r.matrix @ v
    denom = lam[:, None] + lam[None, :]
    solvable = denom > eps_rank * lam_max
    x_eig = np.zeros_like(r_eig)
    x_eig[solvable] = 2.0 * r_eig[solvable] / denom[solvable]

    residual = float(np.linalg.norm((0.5 * denom * x_eig - r_eig)[solvable]))
    rank = int(np.count_nonzero(lam > eps_rank * lam_max))
    x = hermitian_part(v @ x_eig @ dagger(v))
    return SldResult(HermitianOperator(x), rank, rho.dim - rank, residual)


def sld(rho: DensityMatrix, h: HermitianOperator, eps_rank: float = 1e-12) -> SldResult:
    """SLD of the covariant family e^{-i phi H} rho e^{i phi H}."""
    rhs = HermitianOperator(hermitian_part(-1j * commutator(h.matrix, rho.matrix)))
    return solve_sld_rhs(rho, rhs, eps_rank)


def qfi(rho: DensityMatrix, h: HermitianOperator, eps_rank: float = 1e-12) -> float:
    """Quantum Fisher information Tr{rho L^2}."""
    return qfi_from_sld(rho, sld(rho, h, eps_rank))


def qfi_from_sld(rho: DensityMatrix, res: SldResult) -> float:
    l = res.L.matrix
    value = float(np.real(np.trace(rho.matrix @ l @ l)))
    return max(value, 0.0)


def is_irreducible(rho: DensityMatrix, h: HermitianOperator, eps: float = 1e-9) -> bool:
    """True iff rho couples all eigenspaces of H into a single block.

    Eigenvalues of H within eps of each other are treated as one
    eigenspace; eigenspaces are connected when rho has a matrix element
    of magnitude above eps between them. Reducibility means rho and H
    share a proper invariant subspace built from H eigenspaces, which can
    trap the alternating iteration inside one block.
    """
    eig = hermitian_eig(h)
    lam, v = eig.eigenvalues, eig.eigenvectors
    dim = h.dim
    # cluster ascending eigenvalues into degenerate groups
    group = np.zeros(dim, dtype=int)
    for j in range(1, dim):
        group[j] = group[j - 1] + (1 if lam[j] - lam[j - 1] > eps else 0)
    n_groups = int(group[-1]) + 1
    if n_groups == 1:
        return True

    rho_eig = dagger(v) @ rho.matrix @ v
    parent = list(range(n_groups))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for j in range(dim):
        for k in range(j + 1, dim):
            if group[j] != group[k] and abs(rho_eig[j, k]) > eps:
                ra, rb = find(group[j]), find(group[k])
                if ra != rb:
                    parent[rb] = ra
    roots = {find(g) for g in range(n_groups)}
    return len(roots) == 1
