"""Closed-form position-momentum correlation matrices.

All matrices use the block layout ``(q_0..q_{n-1}, p_0..p_{n-1})`` for rows
and columns. The 2x2 sub-block of a site pair (x, y) is

    [[<q_x q_y>, <q_x p_y>],
     [<p_x q_y>, <p_x p_y>]]

with the operators on the left evolved in time where applicable. Everything
here is a spectral sum over the modes of the effective Hamiltonian: writing
``f`` for a mode frequency and ``m`` for its occupation, the per-mode weights
are

* occupation-labeled eigenstate, mixed time:
  qq: (m cos(2ft) + exp(-2ift)/2) / f      qp:  m sin(2ft) + i exp(-2ift)/2
  pp: (m cos(2ft) + exp(-2ift)/2) * f      pq: -qp
* thermal state at inverse temperature beta:
  qq: coth(beta f) / (2f),  pp: coth(beta f) f / 2,  qp = i/2 on the diagonal
* quench propagator (equal-time evolution of a time-zero matrix):
  V_t has cos(2ft) on both diagonal blocks, sin(2ft)/f and -f sin(2ft) off.

Equal-time matrices satisfy the canonical-commutator identity
``G - G.T == i*J`` with ``J = [[0, I], [-I, 0]]``; mixed-time matrices do not
(their antisymmetric part carries the dynamical phase), which is why
:func:`ccr_defect` is only meaningful for states and evolved states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import (
    BlockMismatch,
    ConfigError,
    DimensionMismatch,
    NonpositiveK,
)
from .lattice import Decomposition, LatticeBox, make_box
from .spectral import ExcitationVector, SpectralData


def symplectic_form(n: int) -> np.ndarray:
    """The antisymmetric form J = [[0, I], [-I, 0]] on n position-momentum pairs."""
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = np.eye(n)
    j[n:, :n] = -np.eye(n)
    return j


@dataclass(frozen=True)
class CorrelationMatrix:
    """A 2n x 2n complex correlation matrix with per-site-pair block access."""

    box: LatticeBox
    data: np.ndarray
    label: str = ""

    def __post_init__(self):
        n = self.box.n_sites
        if self.data.shape != (2 * n, 2 * n):
            raise DimensionMismatch(
                f"data shape {self.data.shape} != {(2 * n, 2 * n)}"
            )

    @property
    def n_sites(self) -> int:
        return self.box.n_sites

    @property
    def qq(self) -> np.ndarray:
        n = self.n_sites
        return self.data[:n, :n]

    @property
    def qp(self) -> np.ndarray:
        n = self.n_sites
        return self.data[:n, n:]

    @property
    def pq(self) -> np.ndarray:
        n = self.n_sites
        return self.data[n:, :n]

    @property
    def pp(self) -> np.ndarray:
        n = self.n_sites
        return self.data[n:, n:]

    def block(self, x: int, y: int) -> np.ndarray:
        """2x2 sub-matrix for the site pair with enumeration indices (x, y)."""
        n = self.n_sites
        return np.array(
            [
                [self.data[x, y], self.data[x, n + y]],
                [self.data[n + x, y], self.data[n + x, n + y]],
            ]
        )

    def hermitian_defect(self) -> float:
        return float(np.abs(self.data - self.data.conj().T).max())

    def ccr_defect(self) -> float:
        """Max deviation of the antisymmetric part from i*J (equal-time identity)."""
        j = symplectic_form(self.n_sites)
        return float(np.abs(self.data - self.data.T - 1j * j).max())


def ccr_defect(corr: CorrelationMatrix) -> float:
    """Module-level convenience for :meth:`CorrelationMatrix.ccr_defect`."""
    return corr.ccr_defect()


# --- state descriptions --------------------------------------------------------


@dataclass(frozen=True)
class Eigenstate:
    """Occupation-labeled eigenstate, given sparsely as (mode, count) pairs."""

    modes: tuple = ()

    def __post_init__(self):
        modes = tuple((int(m), int(c)) for m, c in self.modes)
        for m, c in modes:
            if m < 0 or c < 0:
                raise ConfigError("mode indices and counts must be nonnegative")
        if len({m for m, _ in modes}) != len(modes):
            raise ConfigError("repeated mode index in eigenstate spec")
        object.__setattr__(self, "modes", modes)

    def excitations(self, n_modes: int) -> ExcitationVector:
        return ExcitationVector.from_pairs(self.modes, n_modes)


@dataclass(frozen=True)
class Thermal:
    beta: float

    def __post_init__(self):
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ConfigError("beta must be finite and positive")


BlockState = Union[Eigenstate, Thermal]


@dataclass(frozen=True)
class ProductState:
    """Uncorrelated product over the blocks of a decomposition (no nesting)."""

    decomposition: Decomposition
    blocks: tuple

    def __post_init__(self):
        if len(self.blocks) != self.decomposition.n_blocks:
            raise BlockMismatch(
                f"{len(self.blocks)} block states for "
                f"{self.decomposition.n_blocks} blocks"
            )
        for b in self.blocks:
            if not isinstance(b, (Eigenstate, Thermal)):
                raise ConfigError(f"block state must not be nested: {b!r}")


# --- elementary kernels -------------------------------------------------------


def coth(x) -> np.ndarray:
    """Overflow-safe coth for positive arguments.

    Uses ``1 + 2/expm1(2x)`` and switches to the asymptotic branch
    ``1 + 2 exp(-2x)`` once ``expm1`` would overflow.
    """
    x = np.asarray(x, dtype=float)
    big = x > 350.0
    safe = np.where(big, 1.0, x)
    out = 1.0 + 2.0 / np.expm1(2.0 * safe)
    return np.where(big, 1.0 + 2.0 * np.exp(-2.0 * np.clip(x, None, 750.0)), out)


def _assemble(sd: SpectralData, qq_w, qp_w, pq_w, pp_w, label: str) -> CorrelationMatrix:
    """Correlation matrix from per-mode weights of the four blocks."""
    vec = sd.vectors
    n = sd.n_modes
    data = np.empty((2 * n, 2 * n), dtype=complex)
    data[:n, :n] = (vec * qq_w) @ vec.T
    data[:n, n:] = (vec * qp_w) @ vec.T
    data[n:, :n] = (vec * pq_w) @ vec.T
    data[n:, n:] = (vec * pp_w) @ vec.T
    return CorrelationMatrix(box=sd.box, data=data, label=label)


# --- closed forms --------------------------------------------------------------


def eigenstate_corr(
    sd: SpectralData, excitations: ExcitationVector, t: float = 0.0
) -> CorrelationMatrix:
    """Mixed-time correlations of an occupation-labeled eigenstate.

    Entry (a, b) of the (x, y) block is the expectation of the time-``t``
    Heisenberg evolution of operator ``a`` at ``x`` times operator ``b`` at
    ``y`` (first-moment terms vanish identically in eigenstates). Requires a
    simple, positive spectrum.
    """
    if excitations.n_modes != sd.n_modes:
        raise DimensionMismatch(
            f"{excitations.n_modes} occupation numbers for {sd.n_modes} modes"
        )
    sd.require_simple()
    f = sd.freqs
    m = excitations.counts.astype(float)
    phase = np.exp(-2j * t * f)
    common = m * np.cos(2.0 * t * f) + 0.5 * phase
    qp = m * np.sin(2.0 * t * f) + 0.5j * phase
    return _assemble(
        sd,
        qq_w=common / f,
        qp_w=qp,
        pq_w=-qp,
        pp_w=common * f,
        label=f"eigenstate(t={t:g})",
    )


class EnvelopeBound(NamedTuple):
    """Entrywise bound on a 2x2 block, valid uniformly in time."""

    bound: np.ndarray  # (2, 2) nonnegative
    norm: float        # its Euclidean operator norm


def eigenstate_sup_envelope(
    sd: SpectralData, excitations: ExcitationVector, x: int, y: int
) -> EnvelopeBound:
    """Time-uniform upper bound for the (x, y) block of eigenstate correlations.

    Each block entry is a finite mode sum whose j-th term has modulus at most
    ``|v_xj v_yj| (m_j + 1/2)`` times a frequency power; summing those moduli
    dominates the entry for every t, and entrywise dominance of nonnegative
    2x2 matrices dominates the Euclidean norm. For a single mode the bound is
    attained (at t = 0 for the qq entry).
    """
    if excitations.n_modes != sd.n_modes:
        raise DimensionMismatch(
            f"{excitations.n_modes} occupation numbers for {sd.n_modes} modes"
        )
    sd.require_simple()
    f = sd.freqs
    w = np.abs(sd.vectors[x] * sd.vectors[y]) * (
        excitations.counts.astype(float) + 0.5
    )
    off = float(w.sum())
    b = np.array([[float((w / f).sum()), off], [off, float((w * f).sum())]])
    half_tr = 0.5 * (b[0, 0] + b[1, 1])
    half_gap = 0.5 * (b[0, 0] - b[1, 1])
    norm = half_tr + np.hypot(half_gap, b[0, 1])
    return EnvelopeBound(bound=b, norm=float(norm))


def thermal_corr(sd: SpectralData, beta: float) -> CorrelationMatrix:
    """Static correlations of the thermal state at inverse temperature beta."""
    if not (np.isfinite(beta) and beta > 0):
        raise ConfigError("beta must be finite and positive")
    f = sd.freqs
    phi = coth(beta * f)
    n = sd.n_modes
    eye = np.full(n, 1.0)
    return _assemble(
        sd,
        qq_w=0.5 * phi / f,
        qp_w=0.5j * eye,
        pq_w=-0.5j * eye,
        pp_w=0.5 * phi * f,
        label=f"thermal(beta={beta:g})",
    )


def single_site_corr(k: float, n: int) -> CorrelationMatrix:
    """Correlation matrix of the n-th level of a single oscillator.

    For spring constant ``k`` the qq entry is ``(1+2n)/sqrt(2k)``, the pp
    entry ``(1+2n) sqrt(k)/(2 sqrt(2))``, and the off-diagonal ``+-i/2``;
    agrees with :func:`eigenstate_corr` on a one-site box at t = 0.
    """
    if k <= 0:
        raise NonpositiveK(f"spring constant must be positive, got {k}")
    if n < 0:
        raise ConfigError("excitation number must be nonnegative")
    amp = 1.0 + 2.0 * n
    data = np.array(
        [
            [amp / np.sqrt(2.0 * k), 0.5j],
            [-0.5j, amp * np.sqrt(k) / (2.0 * np.sqrt(2.0))],
        ]
    )
    return CorrelationMatrix(
        box=make_box([(0, 0)]), data=data, label=f"single_site(k={k:g}, n={n})"
    )


def quench_propagator(sd: SpectralData, t: float) -> np.ndarray:
    """The symplectic matrix conjugating time-zero correlations to time t."""
    vec = sd.vectors
    f = sd.freqs
    c = np.cos(2.0 * t * f)
    s = np.sin(2.0 * t * f)
    n = sd.n_modes
    out = np.empty((2 * n, 2 * n))
    cos_m = (vec * c) @ vec.T
    out[:n, :n] = cos_m
    out[n:, n:] = cos_m
    out[:n, n:] = (vec * (s / f)) @ vec.T
    out[n:, :n] = -(vec * (s * f)) @ vec.T
    return out


def evolve_correlations(
    sd_full: SpectralData, corr0: CorrelationMatrix, t: float
) -> CorrelationMatrix:
    """Equal-time correlations at time t of a state with time-zero matrix corr0.

    Conjugation by the symplectic propagator preserves the antisymmetric part,
    so the canonical-commutator identity survives evolution exactly. ``t = 0``
    returns the input data unchanged.
    """
    if corr0.n_sites != sd_full.box.n_sites:
        raise DimensionMismatch(
            f"correlations on {corr0.n_sites} sites, "
            f"spectral data on {sd_full.box.n_sites}"
        )
    if t == 0.0:
        return CorrelationMatrix(
            box=sd_full.box, data=corr0.data.copy(), label=corr0.label
        )
    v = quench_propagator(sd_full, t)
    data = v @ corr0.data @ v.T
    return CorrelationMatrix(
        box=sd_full.box, data=data, label=f"evolved(t={t:g}; {corr0.label})"
    )


def product_block_corr(
    dec: Decomposition, block_corrs: list[CorrelationMatrix]
) -> CorrelationMatrix:
    """Assemble the correlation matrix of an uncorrelated block product.

    The (x, y) block equals the block-local value when x and y share a block
    and is exactly zero otherwise.
    """
    if len(block_corrs) != dec.n_blocks:
        raise BlockMismatch(
            f"{len(block_corrs)} correlation matrices for {dec.n_blocks} blocks"
        )
    n = dec.parent.n_sites
    data = np.zeros((2 * n, 2 * n), dtype=complex)
    for bi, corr in enumerate(block_corrs):
        blk = dec.blocks[bi]
        if corr.n_sites != blk.n_sites:
            raise BlockMismatch(
                f"block {bi}: matrix on {corr.n_sites} sites, box has {blk.n_sites}"
            )
        idx = dec.parent_indices(bi)
        m = blk.n_sites
        data[np.ix_(idx, idx)] = corr.data[:m, :m]
        data[np.ix_(idx, n + idx)] = corr.data[:m, m:]
        data[np.ix_(n + idx, idx)] = corr.data[m:, :m]
        data[np.ix_(n + idx, n + idx)] = corr.data[m:, m:]
    return CorrelationMatrix(box=dec.parent, data=data, label="product")


def eigenfunction_correlator(sd: SpectralData, x: int, y: int, power: float) -> float:
    """Largest |<delta_x, h^power g(h) delta_y>| over test functions |g| <= 1.

    For a simple spectrum the supremum is attained by aligning the phase of
    every mode term, giving the absolute mode sum
    ``sum_j eigval_j^power |v_xj| |v_yj|``. Power is restricted to
    {-1/2, 0, +1/2}.
    """
    if power not in (-0.5, 0.0, 0.5):
        raise ConfigError(f"power must be one of -0.5, 0.0, 0.5; got {power}")
    sd.require_simple()
    w = sd.eigvals**power if power != 0.0 else np.ones_like(sd.eigvals)
    return float(np.sum(w * np.abs(sd.vectors[x]) * np.abs(sd.vectors[y])))


def block_norm(corr: CorrelationMatrix, x: int, y: int) -> float:
    """Largest singular value of the 2x2 block of a site pair."""
    m = corr.block(x, y)
    return float(np.linalg.norm(m, ord=2))


def block_norms_all(qq, qp, pq, pp) -> np.ndarray:
    """Largest singular value of every 2x2 block, vectorized over site pairs.

    Inputs are the four n x n block matrices; output is n x n. Uses the
    closed form for 2x2 singular values to avoid per-pair SVD calls.
    """
    f2 = (
        np.abs(qq) ** 2 + np.abs(qp) ** 2 + np.abs(pq) ** 2 + np.abs(pp) ** 2
    )
    det = np.abs(qq * pp - qp * pq) ** 2
    disc = np.sqrt(np.maximum(f2 * f2 - 4.0 * det, 0.0))
    return np.sqrt(0.5 * (f2 + disc))
