"""Brute-force verification in a truncated per-site boson basis.

This module never touches the closed-form correlation formulas: it represents
the full many-body Hamiltonian

    H = sum_x [ p_x^2 + (k_x/2) q_x^2 ] + coupling * sum_edges (q_x - q_y)^2

with per-site ladder operators truncated at occupation ``cutoff``, then
diagonalizes it and evaluates correlation matrices directly from expectation
values. Position and momentum at a site use the local length scale
``c = (2 k)**(-1/4)``, i.e. ``q = c (a + a*)`` and ``p = (i/(2c)) (a* - a)``,
which makes the uncoupled single-site Hamiltonian exactly diagonal with
eigenvalues ``(2n + 1) sqrt(k/2)`` - the fastest-converging choice and a free
sanity check on the spectrum.

Supported here: boxes of at most 3 sites, pure eigenstates matched by energy,
thermal densities with a truncation-quality guard, and product initial
densities for quenches evolved under the fully coupled Hamiltonian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correlations import BlockState, CorrelationMatrix, Eigenstate, Thermal
from .disorder import KField
from .errors import (
    AmbiguousMatch,
    BlockMismatch,
    ConfigError,
    CutoffTooSmall,
    KTooSmall,
    NoMatch,
    TooLarge,
)
from .lattice import Decomposition
from .spectral import SpectralData, build_h, diagonalize

#: smallest spring constant the truncated basis can represent usefully
K_FLOOR = 0.05

#: hard guard on the truncated dimension
MAX_DIM = 100_000

#: admissible thermal weight at the truncation edge, relative to Z
THERMAL_EDGE_TOL = 1e-10


def _ladder(cutoff: int) -> np.ndarray:
    """Lowering operator on occupations 0..cutoff."""
    a = np.zeros((cutoff + 1, cutoff + 1))
    ns = np.arange(1, cutoff + 1)
    a[ns - 1, ns] = np.sqrt(ns)
    return a


def _embed(op: np.ndarray, site: int, dims: list[int]) -> np.ndarray:
    """Site-local operator acting on the product space (site 0 slowest)."""
    out = np.eye(1)
    for j, d in enumerate(dims):
        out = np.kron(out, op if j == site else np.eye(d))
    return out


@dataclass(frozen=True)
class TruncatedSpace:
    """Per-site truncated boson basis with position/momentum matrices."""

    kf: KField
    cutoff: int

    def __post_init__(self):
        box = self.kf.box
        if box.n_sites > 3:
            raise TooLarge(f"oracle limited to 3 sites, got {box.n_sites}")
        if self.cutoff < 1:
            raise ConfigError("cutoff must be at least 1")
        if (self.kf.k < K_FLOOR).any():
            raise KTooSmall(
                f"min k = {self.kf.k.min():.4g} below oracle floor {K_FLOOR}"
            )
        if self.dim > MAX_DIM:
            raise TooLarge(f"truncated dimension {self.dim} > {MAX_DIM}")

    @property
    def n_sites(self) -> int:
        return self.kf.box.n_sites

    @property
    def dim(self) -> int:
        return (self.cutoff + 1) ** self.n_sites

    @property
    def local_freqs(self) -> np.ndarray:
        """Uncoupled per-site frequencies sqrt(k/2)."""
        return np.sqrt(self.kf.k / 2.0)

    def position_ops(self) -> list[np.ndarray]:
        """Real symmetric q_x on the product space, one per site."""
        a = _ladder(self.cutoff)
        dims = [self.cutoff + 1] * self.n_sites
        c = (2.0 * self.kf.k) ** (-0.25)
        return [_embed(c[x] * (a + a.T), x, dims) for x in range(self.n_sites)]

    def momentum_parts(self) -> list[np.ndarray]:
        """Real antisymmetric P_x with p_x = i * P_x."""
        a = _ladder(self.cutoff)
        dims = [self.cutoff + 1] * self.n_sites
        c = (2.0 * self.kf.k) ** (-0.25)
        return [
            _embed((a.T - a) / (2.0 * c[x]), x, dims) for x in range(self.n_sites)
        ]

    def hamiltonian(self) -> np.ndarray:
        """The truncated many-body Hamiltonian, real symmetric."""
        qs = self.position_ops()
        ps = self.momentum_parts()
        h = np.zeros((self.dim, self.dim))
        for x in range(self.n_sites):
            h += -ps[x] @ ps[x] + 0.5 * self.kf.k[x] * (qs[x] @ qs[x])
        for i, j in self.kf.box.edges():
            d = qs[i] - qs[j]
            h += self.kf.coupling * (d @ d)
        return h


def build_truncated_H(
    kf: KField, cutoff: int
) -> tuple[TruncatedSpace, np.ndarray]:
    """Truncated space and its Hamiltonian matrix for one realization."""
    space = TruncatedSpace(kf=kf, cutoff=cutoff)
    return space, space.hamiltonian()


def find_eigenstate(
    evals: np.ndarray,
    evecs: np.ndarray,
    sd: SpectralData,
    excitations,
    rtol: float = 1e-6,
) -> np.ndarray:
    """Eigenvector of the truncated Hamiltonian matched by target energy.

    The target is ``sum_j (2 m_j + 1) freq_j`` from the exact spectral data;
    exactly one truncated eigenvalue must lie within ``rtol * (1 + |E|)``.
    """
    counts = np.asarray(
        excitations.counts if hasattr(excitations, "counts") else excitations,
        dtype=float,
    )
    target = float(np.sum((2.0 * counts + 1.0) * sd.freqs))
    tol = rtol * (1.0 + abs(target))
    hits = np.nonzero(np.abs(evals - target) <= tol)[0]
    if hits.size == 0:
        raise NoMatch(f"no truncated eigenvalue within {tol:.2e} of {target:.8f}")
    if hits.size > 1:
        raise AmbiguousMatch(
            f"{hits.size} truncated eigenvalues within {tol:.2e} of {target:.8f}"
        )
    return evecs[:, hits[0]]


def _logsumexp(v: np.ndarray) -> float:
    m = float(v.max())
    return m + float(np.log(np.sum(np.exp(v - m))))


def check_thermal_cutoff(space: TruncatedSpace, beta: float, evals: np.ndarray):
    """Fail if the lightest discarded uncoupled level still carries weight.

    The smallest discarded energy is one uncoupled excitation past the edge at
    the softest site; requires ``exp(-beta E_edge)/Z`` below the tolerance.
    """
    f = space.local_freqs
    e_edge = float(f.sum() + 2.0 * (space.cutoff + 1) * f.min())
    log_ratio = -beta * e_edge - _logsumexp(-beta * evals)
    if log_ratio >= np.log(THERMAL_EDGE_TOL):
        raise CutoffTooSmall(
            f"edge weight exp({log_ratio:.2f}) >= {THERMAL_EDGE_TOL:.0e}; "
            f"raise the cutoff ({space.cutoff}) or beta ({beta})"
        )


def thermal_density(
    space: TruncatedSpace, evals: np.ndarray, evecs: np.ndarray, beta: float
) -> np.ndarray:
    """Normalized thermal density matrix in the occupation basis."""
    check_thermal_cutoff(space, beta, evals)
    w = np.exp(-beta * (evals - evals[0]))
    w /= w.sum()
    return (evecs * w) @ evecs.T


def product_initial_density(
    kf: KField, dec: Decomposition, blocks: list[BlockState], cutoff: int
) -> np.ndarray:
    """Initial density of a quench: product of per-block states.

    Each block state is an eigenstate or thermal state of the block's own
    restricted Hamiltonian, built in the block's truncated basis with the
    same per-site length scales. Blocks must be contiguous in the parent
    enumeration so the product-space ordering matches.
    """
    if len(blocks) != dec.n_blocks:
        raise BlockMismatch(f"{len(blocks)} states for {dec.n_blocks} blocks")
    offset = 0
    rho = np.eye(1)
    for bi, spec in enumerate(blocks):
        idx = dec.parent_indices(bi)
        if not np.array_equal(idx, np.arange(offset, offset + idx.size)):
            raise BlockMismatch(
                "oracle quench needs blocks contiguous in enumeration order"
            )
        offset += idx.size
        block_kf = KField(
            box=dec.blocks[bi],
            k=kf.k[idx],
            coupling=kf.coupling,
            sample_index=kf.sample_index,
            k_max=kf.k_max,
        )
        space = TruncatedSpace(kf=block_kf, cutoff=cutoff)
        evals, evecs = np.linalg.eigh(space.hamiltonian())
        if isinstance(spec, Thermal):
            rho_b = thermal_density(space, evals, evecs, spec.beta)
        elif isinstance(spec, Eigenstate):
            sd = diagonalize(build_h(block_kf))
            psi = find_eigenstate(
                evals, evecs, sd, spec.excitations(sd.n_modes)
            )
            rho_b = np.outer(psi, psi)
        else:
            raise ConfigError(f"unsupported block state {spec!r}")
        rho = np.kron(rho, rho_b)
    return rho


def oracle_corr_series(
    space: TruncatedSpace,
    evals: np.ndarray,
    evecs: np.ndarray,
    state,
    times,
) -> list[CorrelationMatrix]:
    """Correlation matrices from first principles, one per requested time.

    ``state`` is a pure-state vector (1-d, occupation basis), a density
    matrix (2-d, occupation basis), or a :class:`Thermal` spec. For pure and
    thermal states the result is the mixed-time matrix (operators on the left
    evolved in time); for a density it is the equal-time matrix of the
    evolved density, which is the quench observable. First moments are
    subtracted in all cases. The expensive operator products are computed
    once and reused across times.
    """
    n = space.n_sites
    ops = [evecs.T @ q @ evecs for q in space.position_ops()]
    ops += [evecs.T @ p @ evecs for p in space.momentum_parts()]
    factors = [1.0] * n + [1.0j] * n
    times = [float(t) for t in times]
    us = [np.exp(-1j * evals * t) for t in times]
    out = [np.empty((2 * n, 2 * n), dtype=complex) for _ in times]

    if isinstance(state, Thermal):
        check_thermal_cutoff(space, state.beta, evals)
        w = np.exp(-state.beta * (evals - evals[0]))
        w /= w.sum()
        # [rho, H] = 0: the entry is sum_mn w_m e^{i(E_m-E_n)t} A_mn B_nm
        means = np.array(
            [fa * float(np.sum(w * np.diag(a))) for a, fa in zip(ops, factors)]
        )
        for i, (a, fa) in enumerate(zip(ops, factors)):
            for j, (b, fb) in enumerate(zip(ops, factors)):
                c = a * b.T
                for w_t, u in enumerate(us):
                    val = (w * np.conj(u)) @ (c @ u)
                    out[w_t][i, j] = fa * fb * val - means[i] * means[j]
        labels = [f"oracle thermal(beta={state.beta:g}, t={t:g})" for t in times]
    elif np.ndim(state) == 1:
        psi = evecs.T @ np.asarray(state, dtype=float)
        vecs = [a @ psi for a in ops]
        means_t = []
        for u in us:
            left = psi * np.conj(u)
            means_t.append(
                np.array([fa * (left @ (a @ (psi * u))) for a, fa in zip(ops, factors)])
            )
        for i, (a, fa) in enumerate(zip(ops, factors)):
            for j, (vb, fb) in enumerate(zip(vecs, factors)):
                for w_t, u in enumerate(us):
                    left = psi * np.conj(u)
                    val = fa * fb * (left @ (a @ (vb * u)))
                    out[w_t][i, j] = val - means_t[w_t][i] * means_t[w_t][j]
        labels = [f"oracle pure(t={t:g})" for t in times]
    elif np.ndim(state) == 2:
        rho_eig = evecs.T @ np.asarray(state, dtype=float) @ evecs
        # tr(rho_t A B) = u^T (rho ∘ (A B)^T) conj(u) with u the phase vector
        means_t = np.empty((len(times), 2 * n), dtype=complex)
        for i, (a, fa) in enumerate(zip(ops, factors)):
            wa = rho_eig * a.T
            for w_t, u in enumerate(us):
                means_t[w_t, i] = fa * (u @ wa @ np.conj(u))
        for i, (a, fa) in enumerate(zip(ops, factors)):
            for j, (b, fb) in enumerate(zip(ops, factors)):
                wab = rho_eig * (a @ b).T
                for w_t, u in enumerate(us):
                    val = fa * fb * (u @ wab @ np.conj(u))
                    out[w_t][i, j] = val - means_t[w_t, i] * means_t[w_t, j]
        labels = [f"oracle density(t={t:g})" for t in times]
    else:
        raise ConfigError(f"unsupported oracle state {type(state)!r}")

    return [
        CorrelationMatrix(box=space.kf.box, data=d, label=lbl)
        for d, lbl in zip(out, labels)
    ]


def oracle_corr(
    space: TruncatedSpace,
    evals: np.ndarray,
    evecs: np.ndarray,
    state,
    t: float = 0.0,
) -> CorrelationMatrix:
    """Single-time convenience wrapper around :func:`oracle_corr_series`."""
    return oracle_corr_series(space, evals, evecs, state, [t])[0]
