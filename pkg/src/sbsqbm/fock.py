"""Brute-force density matrices of a single bath mode in a truncated Fock basis.

This is the independent check on the closed-form indicators: thermal state,
displacement by matrix exponential, free rotation, then trace overlaps and
the generalized overlap ``tr sqrt(sqrt(rho1) rho2 sqrt(rho1))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import NumericalInstabilityError, ParameterError, TruncationError
from .indicators import alpha
from .params import ModelParams

#: Extra levels carried beyond the working dimension to keep the edge of the
#: truncated displacement away from the populated block.
EDGE_PAD = 40


@dataclass(frozen=True)
class TruncationBudget:
    max_trace_deficit: float = 1e-8

    def __post_init__(self):
        if not 0 < self.max_trace_deficit < 1:
            raise ParameterError("max_trace_deficit must lie in (0, 1)")

    def dimension(self, nbar, max_disp_sq=0.0):
        """Working dimension for occupation ``nbar`` and displacement ``|beta|^2``."""
        log_b = math.log(1.0 / self.max_trace_deficit)
        dim = nbar * log_b + 4.0 * max_disp_sq + 20.0
        if nbar > 0:
            # geometric tail r**D <= budget
            dim = max(dim, log_b / math.log1p(1.0 / nbar))
        return int(math.ceil(dim))


@dataclass(frozen=True, eq=False)
class FockState:
    dim: int
    matrix: np.ndarray
    trace_deficit: float

    @property
    def purity(self):
        return float(np.real(np.vdot(self.matrix, self.matrix)))


def occupation(omega, T, params: ModelParams):
    """Bose-Einstein occupation ``1/(exp(hbar w / kB T) - 1)``; 0 at ``T = 0``."""
    if T == 0:
        return 0.0
    return 1.0 / math.expm1(params.hbar * omega / (params.kB * T))


def thermal_state(nbar, dim, budget: TruncationBudget | None = None) -> FockState:
    if not (math.isfinite(nbar) and nbar >= 0):
        raise ParameterError(f"nbar must be finite and >= 0, got {nbar!r}")
    if dim < 1:
        raise ParameterError("dim must be >= 1")
    budget = budget or TruncationBudget()
    r = nbar / (nbar + 1.0)
    n = np.arange(dim)
    p = (1.0 - r) * r**n
    deficit = r**dim
    if deficit > budget.max_trace_deficit:
        raise TruncationError(f"dim={dim} leaves a thermal tail of {deficit:.3g}", deficit=deficit)
    return FockState(dim, np.diag(p).astype(complex), float(deficit))


def annihilation(dim):
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)


def displacement(beta, dim):
    """``exp(beta a^dag - conj(beta) a)`` on ``dim`` levels."""
    beta = complex(beta)
    if abs(beta) ** 2 > dim / 10.0:
        raise TruncationError(f"|beta|^2={abs(beta) ** 2:.3g} too large for dim={dim}")
    a = annihilation(dim)
    return expm(beta * a.T - np.conj(beta) * a)


def rotation(omega, t, dim):
    """Free evolution ``exp(-i H t / hbar)`` with ``H = hbar w (n + 1/2)``; phase dropped."""
    return np.exp(-1j * omega * t * np.arange(dim))


def _displaced_thermal(betas, nbar, budget, rotate_by=None):
    """States ``R D(beta) rho D(beta)^dag R^dag`` cropped to a common working block."""
    max_sq = max(abs(b) ** 2 for b in betas)
    dim = budget.dimension(nbar, max_sq)
    big = dim + EDGE_PAD
    big = max(big, int(math.ceil(10 * max_sq)) + 1)
    rho = thermal_state(nbar, big, budget)
    tail = rho.trace_deficit
    states = []
    for beta in betas:
        D = displacement(beta, big)
        m = D @ rho.matrix @ D.conj().T
        if rotate_by is not None:
            phase = rotation(*rotate_by, big)
            m = phase[:, None] * m * phase.conj()[None, :]
        block = m[:dim, :dim]
        deficit = 1.0 - float(np.real(np.trace(block))) + tail
        if deficit > 10 * budget.max_trace_deficit:
            raise TruncationError(f"displaced state loses {deficit:.3g} at dim={dim}",
                                  deficit=deficit)
        states.append(FockState(dim, block, max(deficit, 0.0)))
    return states


def evolved_state(X0, t, osc, params: ModelParams, T,
                  budget: TruncationBudget | None = None, rotate=True) -> FockState:
    """Mode state after time ``t`` with the central oscillator pinned at ``X0``."""
    budget = budget or TruncationBudget()
    beta = complex(alpha(t, osc, params)) * X0
    nbar = occupation(osc.omega, T, params)
    return _displaced_thermal([beta], nbar, budget, (osc.omega, t) if rotate else None)[0]


def gamma_oracle(t, X0, X0p, osc, params: ModelParams, T,
                 budget: TruncationBudget | None = None):
    """``tr[U(X0) rho U(X0')^dag]`` without the X0-dependent global phase.

    The rotation cancels inside the trace, leaving
    ``tr[D(beta')^dag D(beta) rho]``.
    """
    budget = budget or TruncationBudget()
    a = complex(alpha(t, osc, params))
    nbar = occupation(osc.omega, T, params)
    betas = [a * X0, a * X0p]
    dim = budget.dimension(nbar, max(abs(b) ** 2 for b in betas))
    big = max(dim + EDGE_PAD, int(math.ceil(10 * max(abs(b) ** 2 for b in betas))) + 1)
    rho = thermal_state(nbar, big, budget)
    D1 = displacement(betas[0], big)
    D2 = displacement(betas[1], big)
    product = D2.conj().T @ D1
    return complex(np.sum(product[:dim, :dim].diagonal() * rho.matrix.diagonal()[:dim]))


def sqrtm_psd(matrix, tol=1e-9):
    """Square root of a Hermitian PSD matrix through its eigendecomposition."""
    h = 0.5 * (matrix + matrix.conj().T)
    vals, vecs = np.linalg.eigh(h)
    scale = max(1.0, float(np.max(np.abs(vals)))) if vals.size else 1.0
    if vals.size and vals.min() < -tol * scale:
        raise NumericalInstabilityError(f"eigenvalue {vals.min():.3g} below -{tol:g}")
    root = np.sqrt(np.clip(vals, 0.0, None))
    return (vecs * root) @ vecs.conj().T


def generalized_overlap(rho1, rho2, tol=1e-9):
    """``tr sqrt(sqrt(rho1) rho2 sqrt(rho1))``."""
    m1 = rho1.matrix if isinstance(rho1, FockState) else np.asarray(rho1)
    m2 = rho2.matrix if isinstance(rho2, FockState) else np.asarray(rho2)
    s1 = sqrtm_psd(m1, tol)
    inner = s1 @ m2 @ s1
    inner = 0.5 * (inner + inner.conj().T)
    vals = np.linalg.eigvalsh(inner)
    if vals.size and vals.min() < -tol:
        raise NumericalInstabilityError(f"eigenvalue {vals.min():.3g} below -{tol:g}")
    return float(np.sum(np.sqrt(np.clip(vals, 0.0, None))))


def overlap_oracle(t, X0, X0p, osc, params: ModelParams, T,
                   budget: TruncationBudget | None = None, rotate=True):
    budget = budget or TruncationBudget()
    a = complex(alpha(t, osc, params))
    nbar = occupation(osc.omega, T, params)
    rho1, rho2 = _displaced_thermal([a * X0, a * X0p], nbar, budget,
                                    (osc.omega, t) if rotate else None)
    return generalized_overlap(rho1, rho2)

