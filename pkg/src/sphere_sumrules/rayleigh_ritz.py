"""Variational estimates for the weighted Laplacian spectrum on the d-sphere.

Projecting -Delta psi = E Sigma psi onto hyperspherical harmonics of degree
ell <= ell_max gives the generalized symmetric eigenproblem A x = E B x with
A = diag(lambda_ell) and overlap B_ij = delta_ij + sum_c c * W(i, j, c).
The computed eigenvalues bound the true ones from above and sink
monotonically as the basis grows.  For a zonal density the overlap couples
only harmonics sharing an m-vector and depends on it only through the
leading entry m2, so the problem splits into banded blocks of size
ell_max - m2 + 1, each carrying the degeneracy of the sphere one dimension
down as its multiplicity; that fast path turns one dense solve of dimension
in the tens of thousands into ell_max + 1 small ones.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import linalg

from . import harmonics
from .density import DensitySpec
from .errors import NonConvergenceError, ValidationError

ZERO_MODE_TOL = 1e-10


def basis_size(d, ell_max):
    """Number of harmonics with degree <= ell_max on S^d (exact integer)."""
    if d < 2:
        raise ValidationError("need sphere dimension d >= 2, got %r" % (d,))
    if ell_max < 0:
        raise ValidationError("cutoff must be >= 0, got %r" % (ell_max,))
    total = math.comb(d + ell_max, ell_max)
    if ell_max >= 1:
        total += math.comb(d + ell_max - 1, ell_max - 1)
    return total


@dataclass(frozen=True)
class TruncatedBasis:
    """All harmonic indices with degree <= ell_max, in canonical order."""

    d: int
    ell_max: int
    indices: tuple

    @property
    def size(self):
        return len(self.indices)


def truncated_basis(d, ell_max):
    """Build the degree-ordered basis; within a degree, lexicographic m."""
    indices = tuple(harmonics.HarmonicIndex(d, ell, m)
                    for ell in range(ell_max + 1)
                    for m in harmonics.enumerate_m(d, ell))
    basis = TruncatedBasis(d, ell_max, indices)
    if basis.size != basis_size(d, ell_max):
        raise ValidationError("basis enumeration does not match the closed "
                              "count for d=%d, ell_max=%d" % (d, ell_max))
    return basis


@dataclass(frozen=True)
class ProblemBlock:
    """One invariant block: A = diag(stiffness), overlap B, and how many
    identical copies of it the full problem contains."""

    label: int
    multiplicity: int
    stiffness: np.ndarray
    overlap: np.ndarray


@dataclass(frozen=True)
class GeneralizedProblem:
    """Truncated weak form A x = E B x, possibly split into blocks."""

    d: int
    ell_max: int
    mode: str
    blocks: tuple
    density: DensitySpec
    basis: TruncatedBasis = None

    @property
    def stiffness(self):
        if len(self.blocks) != 1:
            raise ValidationError("stiffness/overlap views need the unsplit "
                                  "problem; this one has %d blocks"
                                  % len(self.blocks))
        return self.blocks[0].stiffness

    @property
    def overlap(self):
        if len(self.blocks) != 1:
            raise ValidationError("stiffness/overlap views need the unsplit "
                                  "problem; this one has %d blocks"
                                  % len(self.blocks))
        return self.blocks[0].overlap

    def shifted(self, gamma):
        """Same pencil with A replaced by A + gamma (diagnostic use)."""
        if gamma <= 0:
            raise ValidationError("shift must be positive, got %r" % (gamma,))
        blocks = tuple(replace(b, stiffness=b.stiffness + gamma)
                       for b in self.blocks)
        return replace(self, blocks=blocks)


def _check_spd(matrix, what):
    try:
        np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        raise ValidationError(
            "the density is not positive on the truncated subspace: "
            "Cholesky factorization of the %s overlap failed" % (what,))


def _assemble_full(d, ell_max, density):
    basis = truncated_basis(d, ell_max)
    idx = basis.indices
    n = basis.size
    entries = density.entries
    complex_density = any(abs(complex(c).imag) > 0 for _, c in entries)
    overlap = np.eye(n, dtype=complex if complex_density else float)
    for i in range(n):
        for j in range(i, n):
            acc = 0.0
            for cidx, c in entries:
                w = harmonics.coupling_W(idx[i], idx[j], cidx)
                if w:
                    acc += c * w
            if acc:
                overlap[i, j] += acc if complex_density else acc.real
                overlap[j, i] = np.conj(overlap[i, j])
    _check_spd(overlap, "full")
    stiffness = np.array([harmonics.eigenvalue(d, h.ell) for h in idx],
                         dtype=float)
    block = ProblemBlock(-1, 1, stiffness, overlap)
    return GeneralizedProblem(d, ell_max, "full", (block,), density, basis)


def _assemble_zonal(d, ell_max, density):
    zc = density.zonal_coeffs()
    blocks = []
    for m2 in range(ell_max + 1):
        ls = np.arange(m2, ell_max + 1)
        stiffness = ls * (ls + d - 1.0)
        overlap = np.eye(len(ls))
        for L, c in zc.items():
            overlap += c * harmonics.zonal_band_matrix(d, L, m2, m2, ell_max)
        _check_spd(overlap, "m2=%d block" % m2)
        mult = harmonics.degeneracy(d - 1, m2)
        blocks.append(ProblemBlock(m2, mult, stiffness, overlap))
    return GeneralizedProblem(d, ell_max, "zonal_blocks", tuple(blocks),
                              density)


def assemble(d, ell_max, density, mode=None):
    """Build the truncated generalized eigenproblem for the given density.

    mode is "full" (one dense matrix over every harmonic), "zonal_blocks"
    (per-m2 blocks, zonal densities only), or None to pick the fast path
    automatically.
    """
    if not isinstance(density, DensitySpec):
        raise ValidationError("density must be a DensitySpec, got %r"
                              % type(density).__name__)
    if density.d != d:
        raise ValidationError("density lives on S^%d, requested problem on "
                              "S^%d" % (density.d, d))
    if ell_max < 0:
        raise ValidationError("cutoff must be >= 0, got %r" % (ell_max,))
    if mode is None:
        mode = "zonal_blocks" if density.is_zonal else "full"
    if mode == "full":
        return _assemble_full(d, ell_max, density)
    if mode == "zonal_blocks":
        if not density.is_zonal:
            raise ValidationError("zonal block assembly needs a zonal "
                                  "density; use mode='full'")
        return _assemble_zonal(d, ell_max, density)
    raise ValidationError("mode must be 'full' or 'zonal_blocks', got %r"
                          % (mode,))


@dataclass(frozen=True)
class SpectrumEstimate:
    """Sorted variational eigenvalues with multiplicities.

    values holds one entry per (eigenvalue, block) pair; multiplicities
    counts the identical copies each entry stands for, so the total count
    with multiplicity equals the basis size.
    """

    d: int
    ell_max: int
    values: np.ndarray
    multiplicities: np.ndarray
    block_labels: np.ndarray
    density: DensitySpec
    retained_count: int

    @property
    def total_count(self):
        return int(self.multiplicities.sum())

    def expand(self):
        """Eigenvalues repeated according to multiplicity, ascending."""
        return np.repeat(self.values, self.multiplicities)

    def rows(self):
        """Deterministic export rows (n, E_n, multiplicity, block_m2)."""
        return [(n, float(self.values[n]), int(self.multiplicities[n]),
                 int(self.block_labels[n])) for n in range(len(self.values))]


def solve_spectrum(problem, retained_count=None):
    """All generalized eigenvalues of the problem, merged across blocks.

    Blocks are independent and could be solved concurrently; the merge
    sorts by (eigenvalue, block label) so the result is deterministic
    either way.  retained_count defaults to half the basis size, the
    truncation trusted downstream when the estimate feeds a partial sum.
    """
    entries = []
    for block in problem.blocks:
        a = np.diag(block.stiffness).astype(block.overlap.dtype)
        try:
            vals = linalg.eigh(a, block.overlap, eigvals_only=True)
        except linalg.LinAlgError as exc:
            raise NonConvergenceError(
                "generalized eigensolve failed on block %r: %s"
                % (block.label, exc))
        entries.extend((float(v), block.multiplicity, block.label)
                       for v in vals)
    entries.sort(key=lambda t: (t[0], t[2]))
    values = np.array([e[0] for e in entries])
    mults = np.array([e[1] for e in entries], dtype=int)
    labels = np.array([e[2] for e in entries], dtype=int)
    total = int(mults.sum())
    if retained_count is None:
        retained_count = total // 2
    if not 0 <= retained_count <= total:
        raise ValidationError("retained count %r outside [0, %d]"
                              % (retained_count, total))
    return SpectrumEstimate(problem.d, problem.ell_max, values, mults,
                            labels, problem.density, retained_count)


def partial_sum(spectrum, p, count=None):
    """Sum of 1/E^p over the lowest `count` nonzero eigenvalues.

    The single zero mode (the constant solves the problem with E = 0) is
    skipped automatically; eigenvalues are consumed in ascending order with
    their multiplicities.  count defaults to the spectrum's retained_count.
    """
    if count is None:
        count = spectrum.retained_count
    available = spectrum.total_count - 1
    if not 0 <= count <= available:
        raise ValidationError(
            "requested %r eigenvalues but only %d nonzero ones are in the "
            "estimate" % (count, available))
    scale = max(1.0, float(abs(spectrum.values[-1])))
    if abs(spectrum.values[0]) > ZERO_MODE_TOL * scale:
        raise ValidationError(
            "lowest computed eigenvalue %g is not a numerical zero mode; "
            "refusing to drop it" % spectrum.values[0])
    total = 0.0
    remaining = count
    skip_zero = 1
    for value, mult in zip(spectrum.values, spectrum.multiplicities):
        take = int(mult)
        if skip_zero:
            drop = min(skip_zero, take)
            take -= drop
            skip_zero -= drop
        if take <= 0:
            continue
        take = min(take, remaining)
        total += take / float(value) ** p
        remaining -= take
        if remaining == 0:
            break
    return total
