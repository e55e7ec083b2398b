"""Wave packets on a 1D grid: dispersion, exchange symmetry, reduced states.

Units ħ = m = 1.  A packet of width sigma released at rest spreads as

    sigma(t) = sigma0 * sqrt(1 + (t / (2 sigma0**2))**2),

free evolution is exact in momentum space (multiply by exp(-i k^2 t / 2)),
and the harmonic oscillator is integrated with the symmetric split-operator
factorization exp(-iV dt/2) exp(-iK dt) exp(-iV dt/2), second order in the
step.  Expectation values obey the classical equation of motion: the
residual |d^2<x>/dt^2 - <F>| vanishes identically for free motion and to
discretization accuracy for the oscillator.

Many-body states are kept symbolic: a state is a sum of product terms over
one-particle grid functions, never an N-index tensor.  All brackets reduce
to one-particle overlaps through the Gram matrix of the packets involved;
for a (anti)symmetrized product the squared norm is N! times the permanent
(determinant) of that Gram matrix, which collapses to the familiar
1/sqrt(N!) prefactor when the packets are orthonormal.  Reduced one-particle
density operators live in the span of the packets, expressed in the
non-orthogonal packet basis with the Gram matrix as metric; their spectra
do not depend on which particle slot is traced out.

The decomposition detector inverts symmetrization: given a state, it
diagonalizes a one-slot reduced density, rotates inside degenerate
eigenspaces to minimize pairwise support overlap (spatial coexistence), and
accepts the candidate packets only if re-symmetrizing them reproduces the
state.  For well-separated packets the answer is unique up to phases and
ordering; for strongly overlapping ones no candidate passes both tests and
the detector reports that no packet picture exists.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import minimize

from .errors import ConfigurationError, DomainError, StateError, ZeroStateError

__all__ = [
    "Grid",
    "WaveFunction",
    "HamiltonianSpec",
    "Symmetry",
    "ExchangeCharacter",
    "ManyBodyState",
    "DensityOperator",
    "DecompositionResult",
    "OrthogonalityReport",
    "gaussian_packet",
    "evolve",
    "overlap",
    "support_overlap",
    "ehrenfest_trace",
    "ehrenfest_residual",
    "symmetrize",
    "permutation_check",
    "reduced_density",
    "detect_particle_decomposition",
    "unitarity_orthogonality_check",
]

_EDGE_LIMIT = 1e-8
_NORM_TOL = 1e-10


@dataclass
class Grid:
    """Uniform periodic grid; the endpoint is excluded as the FFT requires."""

    x_min: float
    x_max: float
    points: int

    def __post_init__(self) -> None:
        if self.x_max <= self.x_min:
            raise ConfigurationError("grid needs x_max > x_min")
        p = self.points
        if p < 8 or (p & (p - 1)) != 0:
            raise ConfigurationError("grid point count must be a power of two, at least 8")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.points)

    @property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.points, d=self.dx)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Grid) and self.x_min == other.x_min
                and self.x_max == other.x_max and self.points == other.points)


def _require_same_grid(a: "WaveFunction", b: "WaveFunction") -> None:
    if a.grid != b.grid:
        raise DomainError("wave functions live on different grids")


@dataclass
class WaveFunction:
    grid: Grid
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (self.grid.points,):
            raise ConfigurationError("amplitude array does not match the grid")
        self.amplitudes = amp
        nrm = self.norm()
        if abs(nrm - 1.0) > _NORM_TOL:
            raise StateError(f"wave function norm {nrm!r} is not 1")
        edge = max(abs(amp[0]), abs(amp[-1]))
        if edge >= _EDGE_LIMIT:
            raise DomainError(
                f"amplitude {edge!r} at the domain edge; enlarge the grid "
                "(periodic wrap-around would contaminate the evolution)")

    def norm(self) -> float:
        return math.sqrt(float(np.sum(np.abs(self.amplitudes) ** 2)) * self.grid.dx)

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def position_mean(self) -> float:
        return float(np.sum(self.grid.x * self.density()) * self.grid.dx)

    def position_spread(self) -> float:
        x = self.grid.x
        mean = self.position_mean()
        var = float(np.sum((x - mean) ** 2 * self.density()) * self.grid.dx)
        return math.sqrt(max(var, 0.0))

    def momentum_mean(self) -> float:
        psi = self.amplitudes
        dpsi = np.fft.ifft(1j * self.grid.k * np.fft.fft(psi))
        return float(np.real(np.sum(np.conj(psi) * (-1j) * dpsi)) * self.grid.dx)


def gaussian_packet(grid: Grid, center: float, momentum: float, width: float) -> WaveFunction:
    """Normalized Gaussian exp(-(x-x0)^2/(4 sigma^2) + i p0 x).

    Requires [center - 6 sigma, center + 6 sigma] inside the domain; note the
    edge-amplitude invariant of WaveFunction is stricter, roughly nine sigma
    of clearance, so give packets room.
    """
    if width <= 0:
        raise ConfigurationError("packet width must be positive")
    if center - 6 * width < grid.x_min or center + 6 * width > grid.x_max:
        raise DomainError(
            "packet tail [center - 6 sigma, center + 6 sigma] leaves the domain")
    x = grid.x
    amp = np.exp(-((x - center) ** 2) / (4.0 * width ** 2) + 1j * momentum * x)
    amp = amp / math.sqrt(float(np.sum(np.abs(amp) ** 2)) * grid.dx)
    return WaveFunction(grid, amp)


@dataclass(frozen=True)
class HamiltonianSpec:
    """Free motion or a harmonic well 0.5 omega^2 x^2 (m = hbar = 1)."""

    kind: str = "free"
    omega: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("free", "harmonic"):
            raise ConfigurationError("hamiltonian kind must be 'free' or 'harmonic'")
        if self.kind == "harmonic" and self.omega <= 0:
            raise ConfigurationError("harmonic frequency must be positive")

    def potential(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "free":
            return np.zeros_like(x)
        return 0.5 * self.omega ** 2 * x ** 2

    def force_mean(self, wf: WaveFunction) -> float:
        if self.kind == "free":
            return 0.0
        return -self.omega ** 2 * wf.position_mean()

    def auto_steps(self, t: float) -> int:
        if self.kind == "free":
            return 1
        return max(1, math.ceil(abs(t) * self.omega / 0.002))


def _check_edges(amp: np.ndarray) -> None:
    if max(abs(amp[0]), abs(amp[-1])) >= _EDGE_LIMIT:
        raise DomainError("wave packet reached the domain edge during evolution")


def evolve(wf: WaveFunction, hamiltonian: HamiltonianSpec, t: float,
           steps: int | None = None) -> WaveFunction:
    """Propagate by time t.

    Free motion is one exact momentum-space phase, whatever the step count.
    The harmonic well uses `steps` symmetric split-operator steps (defaults
    to a step near 0.002/omega); halving the step quarters the error.
    """
    if t < 0:
        raise ConfigurationError("evolution time must be nonnegative")
    if steps is None:
        steps = hamiltonian.auto_steps(t)
    if steps < 1:
        raise ConfigurationError("need at least one step")
    if t == 0.0:
        return WaveFunction(wf.grid, wf.amplitudes.copy())
    grid = wf.grid
    k = grid.k
    if hamiltonian.kind == "free":
        amp = np.fft.ifft(np.exp(-0.5j * k ** 2 * t) * np.fft.fft(wf.amplitudes))
        _check_edges(amp)
        return WaveFunction(grid, amp)
    dt = t / steps
    half_v = np.exp(-0.5j * hamiltonian.potential(grid.x) * dt)
    kin = np.exp(-0.5j * k ** 2 * dt)
    amp = wf.amplitudes
    for _ in range(steps):
        amp = half_v * amp
        amp = np.fft.ifft(kin * np.fft.fft(amp))
        amp = half_v * amp
        _check_edges(amp)
    return WaveFunction(grid, amp)


def overlap(a: WaveFunction, b: WaveFunction) -> complex:
    """One-particle inner product <a|b> on the common grid."""
    _require_same_grid(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes) * a.grid.dx)


def support_overlap(a: WaveFunction, b: WaveFunction) -> float:
    """Integral of min(|a|^2, |b|^2): how much the densities coexist in space."""
    _require_same_grid(a, b)
    return float(np.sum(np.minimum(a.density(), b.density())) * a.grid.dx)


def ehrenfest_trace(hamiltonian: HamiltonianSpec, wf: WaveFunction, t_max: float,
                    samples: int, steps_per_sample: int | None = None):
    """Sample <x>, <p>, <F> on an even time grid, evolving incrementally.

    Returns (times, x_mean, p_mean, f_mean, residual) where residual holds
    |second central difference of <x> minus <F>| at interior samples and NaN
    at the two ends where the stencil does not exist.
    """
    if samples < 5:
        raise ConfigurationError("need at least 5 samples for the acceleration stencil")
    if t_max <= 0:
        raise ConfigurationError("t_max must be positive")
    dt = t_max / (samples - 1)
    if steps_per_sample is None:
        steps_per_sample = hamiltonian.auto_steps(dt)
    times = np.arange(samples) * dt
    x_mean = np.empty(samples)
    p_mean = np.empty(samples)
    f_mean = np.empty(samples)
    current = wf
    for j in range(samples):
        x_mean[j] = current.position_mean()
        p_mean[j] = current.momentum_mean()
        f_mean[j] = hamiltonian.force_mean(current)
        if j + 1 < samples:
            current = evolve(current, hamiltonian, dt, steps_per_sample)
    residual = np.full(samples, np.nan)
    accel = (x_mean[2:] - 2.0 * x_mean[1:-1] + x_mean[:-2]) / dt ** 2
    residual[1:-1] = np.abs(accel - f_mean[1:-1])
    return times, x_mean, p_mean, f_mean, residual


def ehrenfest_residual(hamiltonian: HamiltonianSpec, wf: WaveFunction, t_max: float,
                       samples: int, steps_per_sample: int | None = None) -> float:
    """Worst interior violation of m d^2<x>/dt^2 = <F> along the trajectory."""
    _, _, _, _, residual = ehrenfest_trace(hamiltonian, wf, t_max, samples,
                                           steps_per_sample)
    return float(np.nanmax(residual))


class Symmetry(Enum):
    BOSE = "bose"
    FERMI = "fermi"


class ExchangeCharacter(Enum):
    INVARIANT = "invariant"
    SIGN_FLIP = "sign-flip"
    NEITHER = "neither"


def _permanent(matrix: np.ndarray) -> complex:
    n = matrix.shape[0]
    total = 0.0 + 0.0j
    for perm in itertools.permutations(range(n)):
        prod = 1.0 + 0.0j
        for i, j in enumerate(perm):
            prod *= matrix[i, j]
        total += prod
    return total


def _gram(packets) -> np.ndarray:
    n = len(packets)
    g = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            g[i, j] = overlap(packets[i], packets[j])
    return g


@dataclass
class ManyBodyState:
    """Sum of weighted product terms over shared one-particle packets."""

    n_particles: int
    terms: list
    symmetry: Symmetry | None = None

    def __post_init__(self) -> None:
        for coeff, factors in self.terms:
            if len(factors) != self.n_particles:
                raise ConfigurationError("every term needs one factor per particle")

    def inner(self, other: "ManyBodyState") -> complex:
        """<self|other> via pairwise one-particle overlaps."""
        if self.n_particles != other.n_particles:
            raise ConfigurationError("particle numbers differ")
        cache: dict = {}

        def ov(f, g) -> complex:
            key = (id(f), id(g))
            if key not in cache:
                cache[key] = overlap(f, g)
            return cache[key]

        total = 0.0 + 0.0j
        for ca, fa in self.terms:
            for cb, fb in other.terms:
                w = np.conj(ca) * cb
                for i in range(self.n_particles):
                    w *= ov(fa[i], fb[i])
                total += w
        return complex(total)

    def norm(self) -> float:
        return math.sqrt(max(np.real(self.inner(self)), 0.0))

    def permuted(self, slot_a: int, slot_b: int) -> "ManyBodyState":
        n = self.n_particles
        if not (0 <= slot_a < n and 0 <= slot_b < n) or slot_a == slot_b:
            raise ConfigurationError("transposition needs two distinct valid slots")
        swapped = []
        for coeff, factors in self.terms:
            f = list(factors)
            f[slot_a], f[slot_b] = f[slot_b], f[slot_a]
            swapped.append((coeff, tuple(f)))
        return ManyBodyState(n, swapped, self.symmetry)

    @staticmethod
    def product(packets) -> "ManyBodyState":
        packets = tuple(packets)
        return ManyBodyState(len(packets), [(1.0 + 0.0j, packets)], None)


def symmetrize(packets, symmetry: Symmetry) -> ManyBodyState:
    """(Anti)symmetrized product with the Gram normalization built in.

    The squared norm of the raw permutation sum is N! times the permanent
    (Bose) or determinant (Fermi) of the packet Gram matrix, so every term
    carries sign(perm) / sqrt(N! perm_or_det).  Orthonormal packets recover
    the textbook 1/sqrt(N!).  Antisymmetrizing linearly dependent packets
    yields the zero vector and raises ZeroStateError.
    """
    packets = tuple(packets)
    n = len(packets)
    if n < 2:
        raise ConfigurationError("symmetrization needs at least two packets")
    for p in packets[1:]:
        _require_same_grid(packets[0], p)
    g = _gram(packets)
    if symmetry is Symmetry.BOSE:
        weight = _permanent(g)
    elif symmetry is Symmetry.FERMI:
        weight = complex(np.linalg.det(g))
    else:
        raise ConfigurationError("symmetry must be BOSE or FERMI")
    nrm2 = math.factorial(n) * np.real(weight)
    if nrm2 <= 1e-12:
        raise ZeroStateError(
            "packets are (numerically) linearly dependent; the antisymmetrized "
            "state vanishes" if symmetry is Symmetry.FERMI else
            "degenerate Gram matrix; cannot normalize the symmetrized state")
    coeff = 1.0 / math.sqrt(nrm2)
    terms = []
    for perm in itertools.permutations(range(n)):
        sign = 1.0
        if symmetry is Symmetry.FERMI:
            sign = _permutation_sign(perm)
        terms.append((sign * coeff, tuple(packets[i] for i in perm)))
    return ManyBodyState(n, terms, symmetry)


def _permutation_sign(perm) -> float:
    sign = 1.0
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def permutation_check(state: ManyBodyState, slot_a: int = 0, slot_b: int = 1,
                      tol: float = 1e-8) -> ExchangeCharacter:
    """Classify the state under one transposition of particle slots."""
    z = state.inner(state.permuted(slot_a, slot_b))
    if abs(z - 1.0) <= tol:
        return ExchangeCharacter.INVARIANT
    if abs(z + 1.0) <= tol:
        return ExchangeCharacter.SIGN_FLIP
    return ExchangeCharacter.NEITHER


@dataclass
class DensityOperator:
    """One-particle operator in a non-orthogonal packet basis.

    rho = sum_kl matrix[k, l] |basis_k><basis_l|; the trace and the spectrum
    are evaluated with the Gram matrix of the basis as metric.
    """

    basis: list
    matrix: np.ndarray

    def __post_init__(self) -> None:
        k = len(self.basis)
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.shape != (k, k):
            raise ConfigurationError("matrix shape does not match the basis")
        if not np.allclose(self.matrix, self.matrix.conj().T, atol=1e-10):
            raise StateError("density matrix must be Hermitian")
        tr = self.trace()
        if abs(tr - 1.0) > 1e-8:
            raise StateError(f"density operator trace {tr!r} is not 1")
        lam = self.eigenvalues()
        if lam.min() < -1e-8 or lam.max() > 1.0 + 1e-8:
            raise StateError("density operator eigenvalues leave [0, 1]")

    def gram(self) -> np.ndarray:
        return _gram(self.basis)

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.gram())))

    def _orthonormal_form(self):
        g = self.gram()
        vals, vecs = np.linalg.eigh(g)
        keep = vals > 1e-12 * max(vals.max(), 1.0)
        vals = vals[keep]
        vecs = vecs[:, keep]
        root = np.sqrt(vals)
        # rho in the orthonormalized basis e = basis . vecs . diag(1/root)
        rho_e = (root[:, None] * vecs.conj().T) @ self.matrix @ (vecs * root[None, :])
        back = vecs * (1.0 / root)[None, :]
        return rho_e, back

    def eigenvalues(self) -> np.ndarray:
        rho_e, _ = self._orthonormal_form()
        return np.linalg.eigvalsh(rho_e)[::-1]

    def eigensystem(self):
        """Eigenvalues (descending) and normalized grid eigenfunctions."""
        rho_e, back = self._orthonormal_form()
        lam, w = np.linalg.eigh(rho_e)
        lam = lam[::-1]
        w = w[:, ::-1]
        coeffs = back @ w  # columns: packet-basis coefficients
        grid = self.basis[0].grid
        stack = np.stack([b.amplitudes for b in self.basis])
        funcs = []
        for c in range(coeffs.shape[1]):
            amp = coeffs[:, c] @ stack
            nrm = math.sqrt(float(np.sum(np.abs(amp) ** 2)) * grid.dx)
            funcs.append(WaveFunction(grid, amp / nrm))
        return lam, funcs

    def distance(self, other: "DensityOperator") -> float:
        """Operator-norm distance, evaluated in a merged orthonormal basis."""
        merged: list = []
        for b in list(self.basis) + list(other.basis):
            if not any(b is m for m in merged):
                merged.append(b)
        k = len(merged)
        index = {id(b): i for i, b in enumerate(merged)}

        def embed(op: DensityOperator) -> np.ndarray:
            m = np.zeros((k, k), dtype=complex)
            for a, ba in enumerate(op.basis):
                for b, bb in enumerate(op.basis):
                    m[index[id(ba)], index[id(bb)]] += op.matrix[a, b]
            return m

        delta = embed(self) - embed(other)
        g = _gram(merged)
        vals, vecs = np.linalg.eigh(g)
        keep = vals > 1e-12 * max(vals.max(), 1.0)
        root = np.sqrt(vals[keep])
        v = vecs[:, keep]
        delta_e = (root[:, None] * v.conj().T) @ delta @ (v * root[None, :])
        return float(np.max(np.abs(np.linalg.eigvalsh(delta_e))))


def reduced_density(state: ManyBodyState, slot: int) -> DensityOperator:
    """Partial trace over every slot except `slot`.

    For state = sum_a c_a prod_i f_{a,i} the reduced operator is
    sum_ab c_a conj(c_b) (prod_{i != slot} <f_{b,i}|f_{a,i}>)
    |f_{a,slot}><f_{b,slot}|, assembled in the basis of distinct packets
    appearing at that slot.  Its spectrum is the same whichever slot is
    kept, which is the index-equivalence property tested in acceptance.
    """
    n = state.n_particles
    if not (0 <= slot < n):
        raise ConfigurationError(f"slot {slot} out of range for {n} particles")
    basis: list = []
    index: dict = {}
    for _, factors in state.terms:
        f = factors[slot]
        if id(f) not in index:
            index[id(f)] = len(basis)
            basis.append(f)
    k = len(basis)
    matrix = np.zeros((k, k), dtype=complex)
    cache: dict = {}

    def ov(f, g) -> complex:
        key = (id(f), id(g))
        if key not in cache:
            cache[key] = overlap(f, g)
        return cache[key]

    for ca, fa in state.terms:
        for cb, fb in state.terms:
            w = ca * np.conj(cb)
            for i in range(n):
                if i != slot:
                    w *= ov(fb[i], fa[i])
            matrix[index[id(fa[slot])], index[id(fb[slot])]] += w
    matrix = 0.5 * (matrix + matrix.conj().T)
    return DensityOperator(basis, matrix)


@dataclass(frozen=True)
class OrthogonalityReport:
    before: complex
    after: complex
    deviation: float


def unitarity_orthogonality_check(a: WaveFunction, b: WaveFunction,
                                  hamiltonian: HamiltonianSpec, t: float,
                                  steps: int | None = None) -> OrthogonalityReport:
    """Inner product before vs after a shared evolution; unitarity keeps it."""
    before = overlap(a, b)
    at = evolve(a, hamiltonian, t, steps)
    bt = evolve(b, hamiltonian, t, steps)
    after = overlap(at, bt)
    return OrthogonalityReport(before=before, after=after,
                               deviation=abs(after - before))


@dataclass
class DecompositionResult:
    """Outcome of the packet-decomposition search.

    packets is None when no set of localized packets reproduces the state;
    degenerate_occupation marks multiply occupied packets (meaningful for
    Bose states such as a doubly occupied mode).
    """

    packets: list | None
    degenerate_occupation: bool = False
    occupations: list = field(default_factory=list)
    max_pairwise_support: float | None = None
    reconstruction_error: float | None = None


def _total_support(funcs, fixed=()) -> float:
    total = 0.0
    for i in range(len(funcs)):
        for j in range(i + 1, len(funcs)):
            total += support_overlap(funcs[i], funcs[j])
        for g in fixed:
            total += support_overlap(funcs[i], g)
    return total


def _rotate_pair(a: WaveFunction, b: WaveFunction, theta: float, phase: float):
    grid = a.grid
    c, s = math.cos(theta), math.sin(theta)
    e = complex(math.cos(phase), math.sin(phase))
    amp_a = c * a.amplitudes + s * e * b.amplitudes
    amp_b = -s * np.conj(e) * a.amplitudes + c * b.amplitudes
    out = []
    for amp in (amp_a, amp_b):
        nrm = math.sqrt(float(np.sum(np.abs(amp) ** 2)) * grid.dx)
        out.append(WaveFunction(grid, amp / nrm))
    return out


def _optimize_pair(a: WaveFunction, b: WaveFunction, fixed, rng) -> tuple:
    """Scan the single-angle-plus-phase rotation, then polish the best cell."""
    thetas = np.linspace(0.0, math.pi, 49)[:-1]
    phases = np.linspace(0.0, 2.0 * math.pi, 17)[:-1]
    if rng is not None:
        thetas = thetas + rng.uniform(0.0, float(thetas[1] - thetas[0]))
        phases = phases + rng.uniform(0.0, float(phases[1] - phases[0]))
    best = (math.inf, 0.0, 0.0)
    for th in thetas:
        for ph in phases:
            cost = _total_support(_rotate_pair(a, b, th, ph), fixed)
            if cost < best[0]:
                best = (cost, float(th), float(ph))

    def objective(params) -> float:
        return _total_support(_rotate_pair(a, b, params[0], params[1]), fixed)

    start = np.array(best[1:])
    if rng is not None:
        start = start + rng.uniform(-1e-3, 1e-3, size=2)
    res = minimize(objective, start, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 400})
    if res.fun <= best[0]:
        return _rotate_pair(a, b, float(res.x[0]), float(res.x[1]))
    return _rotate_pair(a, b, best[1], best[2])


def _localize_group(funcs, fixed, rng):
    """Jacobi-style sweeps of pairwise rotations inside one degenerate space."""
    funcs = list(funcs)
    if len(funcs) < 2:
        return funcs
    if len(funcs) == 2:
        return _optimize_pair(funcs[0], funcs[1], fixed, rng)
    for _ in range(12):
        before = _total_support(funcs, fixed)
        for i in range(len(funcs)):
            for j in range(i + 1, len(funcs)):
                others = [funcs[q] for q in range(len(funcs)) if q not in (i, j)]
                funcs[i], funcs[j] = _optimize_pair(
                    funcs[i], funcs[j], tuple(others) + tuple(fixed), rng)
        after = _total_support(funcs, fixed)
        if before - after < 1e-12:
            break
    return funcs


def _canonical_phase(wf: WaveFunction) -> WaveFunction:
    amp = wf.amplitudes
    peak = int(np.argmax(np.abs(amp)))
    ref = amp[peak]
    if abs(ref) == 0.0:
        return wf
    return WaveFunction(wf.grid, amp * (np.conj(ref) / abs(ref)))


def detect_particle_decomposition(state: ManyBodyState,
                                  epsilon_support: float = 1e-6,
                                  epsilon_reconstruct: float = 1e-6,
                                  degeneracy_tol: float = 1e-6,
                                  optimizer_rng: np.random.Generator | None = None
                                  ) -> DecompositionResult:
    """Search for localized packets whose symmetrization is the state.

    Steps: diagonalize the slot-0 reduced density; read occupation numbers
    off eigenvalue * N; rotate inside degenerate eigenspaces to minimize
    pairwise support overlap; accept only if distinct candidates coexist
    below epsilon_support and re-symmetrizing reproduces the state within
    epsilon_reconstruct in norm (global phase factored out).  The returned
    packets carry a canonical phase and are ordered by position mean, so a
    successful detection is reproducible from any optimizer start.
    """
    n = state.n_particles
    lam, funcs = reduced_density(state, 0).eigensystem()
    occ = [int(round(float(l) * n)) for l in lam]
    kept = [(float(lam[i]), occ[i], funcs[i]) for i in range(len(occ)) if occ[i] >= 1]
    if sum(o for _, o, _ in kept) != n:
        return DecompositionResult(packets=None)

    # group near-equal eigenvalues; only inside a group is the basis free
    groups: list = []
    for item in kept:
        if groups and abs(groups[-1][-1][0] - item[0]) <= degeneracy_tol:
            groups[-1].append(item)
        else:
            groups.append([item])

    final = []
    for gi, group in enumerate(groups):
        members = [f for _, _, f in group]
        fixed = [f for gj, other in enumerate(groups) if gj != gi
                 for _, _, f in other]
        rotated = _localize_group(members, tuple(fixed), optimizer_rng)
        for (lam_i, occ_i, _), f in zip(group, rotated):
            final.append((occ_i, f))

    entries = [(_canonical_phase(f), occ_i) for occ_i, f in final]
    entries.sort(key=lambda e: e[0].position_mean())
    occupations = [occ_i for _, occ_i in entries]
    distinct = [p for p, _ in entries]
    packets = [p for p, occ_i in entries for _ in range(occ_i)]
    max_support = 0.0
    for i in range(len(distinct)):
        for j in range(i + 1, len(distinct)):
            max_support = max(max_support, support_overlap(distinct[i], distinct[j]))
    degenerate = any(o >= 2 for o in occupations)
    if max_support > epsilon_support:
        return DecompositionResult(packets=None, degenerate_occupation=degenerate,
                                   occupations=occupations,
                                   max_pairwise_support=max_support)

    symmetries = [state.symmetry] if state.symmetry is not None \
        else [Symmetry.BOSE, Symmetry.FERMI]
    for sym in symmetries:
        try:
            recon = symmetrize(packets, sym)
        except ZeroStateError:
            continue
        fidelity = abs(state.inner(recon))
        error = math.sqrt(max(0.0, 2.0 - 2.0 * fidelity))
        if error <= epsilon_reconstruct:
            return DecompositionResult(packets=packets, degenerate_occupation=degenerate,
                                       occupations=occupations,
                                       max_pairwise_support=max_support,
                                       reconstruction_error=error)
    return DecompositionResult(packets=None, degenerate_occupation=degenerate,
                               occupations=occupations,
                               max_pairwise_support=max_support)
