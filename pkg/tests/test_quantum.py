"""Wave-packet checks against closed-form one-particle results and
brute-force many-body linear algebra.

Closed forms used below, with hbar = m = 1 and sigma the position spread:
free spreading sigma(t) = sigma0 sqrt(1 + (t / 2 sigma0^2)^2); Gaussian
pair overlap |<a|b>| = exp(-d^2/(8 sigma^2) - dp^2 sigma^2 / 2); shared
density mass of two equal-width Gaussians a distance d apart equal to
2 Phi(-d / (2 sigma)).
"""

import math

import numpy as np
import pytest

from gibbslab.errors import (ConfigurationError, DomainError, StateError,
                             ZeroStateError)
from gibbslab.quantum import (DecompositionResult, DensityOperator,
                              ExchangeCharacter, Grid, HamiltonianSpec,
                              ManyBodyState, Symmetry, WaveFunction,
                              detect_particle_decomposition, ehrenfest_residual,
                              ehrenfest_trace, evolve, gaussian_packet, overlap,
                              permutation_check, reduced_density,
                              support_overlap, symmetrize,
                              unitarity_orthogonality_check)

FREE = HamiltonianSpec("free")

# exp(-1/2), exp(-2), 2 Phi(-2), sqrt 2: all from independent tables
EXP_HALF = 0.6065306597126334
EXP_TWO = 0.1353352832366127
TWO_PHI_MINUS_TWO = 0.04550026389635842
SQRT_2 = 1.4142135623730951


def far_pair(grid=None, distance=14.0, momentum=0.0, width=1.0):
    g = grid if grid is not None else Grid(-30.0, 30.0, 1024)
    a = gaussian_packet(g, -distance / 2, +momentum, width)
    b = gaussian_packet(g, +distance / 2, -momentum, width)
    return a, b


# ------------------------------------------------------------------- grid

def test_grid_rejects_awkward_sampling():
    with pytest.raises(ConfigurationError):
        Grid(-10.0, 10.0, 12)
    with pytest.raises(ConfigurationError):
        Grid(-10.0, 10.0, 4)
    with pytest.raises(ConfigurationError):
        Grid(10.0, -10.0, 64)


def test_grid_layout():
    g = Grid(-40.0, 40.0, 2048)
    assert g.dx == pytest.approx(80.0 / 2048, rel=1e-15)
    assert g.x[0] == -40.0
    assert g.k[1] == pytest.approx(2 * math.pi / 80.0, rel=1e-12)
    assert g == Grid(-40.0, 40.0, 2048)
    assert g != Grid(-40.0, 40.0, 1024)


def test_wavefunction_invariants():
    g = Grid(-10.0, 10.0, 64)
    with pytest.raises(StateError):
        WaveFunction(g, np.full(64, 0.5 + 0j))
    with pytest.raises(ConfigurationError):
        WaveFunction(g, np.zeros(32, dtype=complex))
    flat = np.full(64, 1.0 / math.sqrt(20.0), dtype=complex)
    with pytest.raises(DomainError):
        WaveFunction(g, flat)


def test_gaussian_packet_moments():
    g = Grid(-30.0, 30.0, 1024)
    wf = gaussian_packet(g, 1.5, -2.0, 0.8)
    assert wf.norm() == pytest.approx(1.0, abs=1e-12)
    assert wf.position_mean() == pytest.approx(1.5, abs=1e-9)
    assert wf.momentum_mean() == pytest.approx(-2.0, abs=1e-9)
    assert wf.position_spread() == pytest.approx(0.8, abs=1e-8)


def test_gaussian_packet_guards():
    g = Grid(-10.0, 10.0, 256)
    with pytest.raises(ConfigurationError):
        gaussian_packet(g, 0.0, 0.0, -1.0)
    with pytest.raises(DomainError):
        gaussian_packet(g, 8.0, 0.0, 1.0)


# -------------------------------------------------------------- evolution

def test_free_spreading_hits_the_closed_form():
    g = Grid(-40.0, 40.0, 2048)
    wf = gaussian_packet(g, 0.0, 0.0, 1.0)
    spread = evolve(wf, FREE, 2.0).position_spread()
    assert spread == pytest.approx(SQRT_2, abs=1e-6)
    narrow = gaussian_packet(g, 0.0, 0.0, 0.5)
    expected = 0.5 * math.sqrt(1.0 + (1.0 / (2 * 0.25)) ** 2)
    assert evolve(narrow, FREE, 1.0).position_spread() == pytest.approx(expected, abs=1e-6)


def test_free_packet_travels_ballistically():
    g = Grid(-40.0, 40.0, 2048)
    wf = gaussian_packet(g, -6.0, 2.0, 1.0)
    moved = evolve(wf, FREE, 3.0)
    assert moved.position_mean() == pytest.approx(0.0, abs=1e-9)
    assert moved.momentum_mean() == pytest.approx(2.0, abs=1e-9)


def test_norm_is_conserved():
    g = Grid(-12.0, 12.0, 1024)
    wf = gaussian_packet(g, 2.0, 0.0, 0.5)
    free_norm = evolve(gaussian_packet(Grid(-40.0, 40.0, 2048), 0.0, 1.0, 1.0),
                       FREE, 2.0).norm()
    assert abs(free_norm - 1.0) <= 1e-10
    well = HamiltonianSpec("harmonic", 1.0)
    assert abs(evolve(wf, well, 2 * math.pi).norm() - 1.0) <= 1e-10


def test_evolution_guards():
    g = Grid(-40.0, 40.0, 2048)
    wf = gaussian_packet(g, 0.0, 0.0, 1.0)
    with pytest.raises(ConfigurationError):
        evolve(wf, FREE, -1.0)
    with pytest.raises(ConfigurationError):
        evolve(wf, FREE, 1.0, steps=0)
    # a packet pushed through the boundary must refuse to wrap around
    mover = gaussian_packet(g, 25.0, 3.0, 1.0)
    with pytest.raises(DomainError):
        evolve(mover, FREE, 8.0)


def test_hamiltonian_spec_validation():
    with pytest.raises(ConfigurationError):
        HamiltonianSpec("anharmonic")
    with pytest.raises(ConfigurationError):
        HamiltonianSpec("harmonic", -2.0)


def test_split_operator_error_shrinks_like_the_square_of_the_step():
    g = Grid(-12.0, 12.0, 1024)
    wf = gaussian_packet(g, 2.0, 0.0, 0.5)
    ham = HamiltonianSpec("harmonic", 1.0)
    reference = evolve(wf, ham, 1.0, steps=3200)

    def deviation(steps):
        fid = abs(overlap(evolve(wf, ham, 1.0, steps=steps), reference))
        return math.sqrt(max(0.0, 2.0 - 2.0 * fid))

    assert deviation(200) / deviation(400) >= 3.5


# ------------------------------------------------------- overlap measures

def test_overlap_factorizes_into_separation_and_momentum():
    g = Grid(-30.0, 30.0, 1024)
    a, b = far_pair(g, distance=2.0)
    assert abs(overlap(a, b)) == pytest.approx(EXP_HALF, abs=1e-9)
    c = gaussian_packet(g, 0.0, 1.0, 1.0)
    d = gaussian_packet(g, 0.0, -1.0, 1.0)
    assert abs(overlap(c, d)) == pytest.approx(EXP_TWO, abs=1e-9)
    assert overlap(a, b) == pytest.approx(np.conj(overlap(b, a)), abs=1e-12)


def test_support_overlap_oracles():
    g = Grid(-30.0, 30.0, 1024)
    wf = gaussian_packet(g, 0.0, 0.0, 1.0)
    assert support_overlap(wf, wf) == pytest.approx(1.0, abs=1e-12)
    # the min of two densities has a kink where they cross, so the grid sum
    # converges slowly; check the value and that refining moves it inward
    a, b = far_pair(g, distance=4.0)
    coarse = support_overlap(a, b)
    assert coarse == pytest.approx(TWO_PHI_MINUS_TWO, abs=2e-4)
    fine_grid = Grid(-30.0, 30.0, 4096)
    fine = support_overlap(*far_pair(fine_grid, distance=4.0))
    assert abs(fine - TWO_PHI_MINUS_TWO) < abs(coarse - TWO_PHI_MINUS_TWO)


def test_mismatched_grids_are_rejected():
    a = gaussian_packet(Grid(-30.0, 30.0, 1024), 0.0, 0.0, 1.0)
    b = gaussian_packet(Grid(-30.0, 30.0, 512), 0.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        overlap(a, b)
    with pytest.raises(DomainError):
        support_overlap(a, b)


# ------------------------------------------------------- mean-value motion

def test_mean_motion_free_has_no_acceleration():
    g = Grid(-40.0, 40.0, 2048)
    wf = gaussian_packet(g, -3.0, 1.0, 1.0)
    assert ehrenfest_residual(FREE, wf, 2.0, 101) <= 1e-6


def test_mean_motion_tracks_the_classical_oscillator():
    g = Grid(-12.0, 12.0, 1024)
    wf = gaussian_packet(g, 2.0, 0.0, 0.5)
    ham = HamiltonianSpec("harmonic", 1.0)
    times, x_mean, p_mean, f_mean, residual = ehrenfest_trace(
        ham, wf, 2 * math.pi, 361)
    assert np.max(np.abs(x_mean - 2.0 * np.cos(times))) <= 1e-4
    assert np.all(np.abs(f_mean + x_mean) <= 1e-9)
    assert math.isnan(residual[0]) and math.isnan(residual[-1])
    assert float(np.nanmax(residual)) <= 1e-4
    # momentum is the velocity of the mean for m = 1
    assert np.max(np.abs(p_mean + 2.0 * np.sin(times))) <= 1e-3


def test_mean_motion_guards():
    g = Grid(-40.0, 40.0, 2048)
    wf = gaussian_packet(g, 0.0, 0.0, 1.0)
    with pytest.raises(ConfigurationError):
        ehrenfest_trace(FREE, wf, 1.0, 4)
    with pytest.raises(ConfigurationError):
        ehrenfest_trace(FREE, wf, 0.0, 10)


# ----------------------------------------------------- exchange symmetry

def test_symmetrized_states_have_definite_exchange_character():
    a, b = far_pair()
    assert permutation_check(symmetrize([a, b], Symmetry.BOSE)) \
        is ExchangeCharacter.INVARIANT
    assert permutation_check(symmetrize([a, b], Symmetry.FERMI)) \
        is ExchangeCharacter.SIGN_FLIP
    assert permutation_check(ManyBodyState.product([a, b])) \
        is ExchangeCharacter.NEITHER


def test_symmetrization_prefactor_for_orthogonal_packets():
    a, b = far_pair()
    sym = symmetrize([a, b], Symmetry.BOSE)
    assert sym.norm() == pytest.approx(1.0, abs=1e-9)
    product = ManyBodyState.product([a, b])
    assert abs(sym.inner(product)) == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-9)


def test_symmetrization_normalizes_overlapping_packets_too():
    a, b = far_pair(distance=2.0)
    for sym in (Symmetry.BOSE, Symmetry.FERMI):
        state = symmetrize([a, b], sym)
        assert state.norm() == pytest.approx(1.0, abs=1e-9)


def test_antisymmetrizing_identical_packets_annihilates():
    g = Grid(-30.0, 30.0, 1024)
    wf = gaussian_packet(g, 0.0, 0.0, 1.0)
    with pytest.raises(ZeroStateError):
        symmetrize([wf, wf], Symmetry.FERMI)
    nearly = gaussian_packet(g, 1e-8, 0.0, 1.0)
    with pytest.raises(ZeroStateError):
        symmetrize([wf, nearly], Symmetry.FERMI)
    doubled = symmetrize([wf, wf], Symmetry.BOSE)
    assert doubled.norm() == pytest.approx(1.0, abs=1e-9)


def test_symmetrize_guards():
    g = Grid(-30.0, 30.0, 1024)
    wf = gaussian_packet(g, 0.0, 0.0, 1.0)
    with pytest.raises(ConfigurationError):
        symmetrize([wf], Symmetry.BOSE)
    other_grid = gaussian_packet(Grid(-30.0, 30.0, 512), 0.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        symmetrize([wf, other_grid], Symmetry.BOSE)


def test_product_state_inner_products():
    a, b = far_pair(distance=2.0)
    ab = ManyBodyState.product([a, b])
    ba = ManyBodyState.product([b, a])
    assert abs(ab.inner(ab)) == pytest.approx(1.0, abs=1e-9)
    s = abs(overlap(a, b))
    assert abs(ab.inner(ba)) == pytest.approx(s * s, abs=1e-9)
    assert abs(ab.permuted(0, 1).inner(ba)) == pytest.approx(1.0, abs=1e-9)


# --------------------------------------------------------- reduced density

def test_reduced_density_is_slot_independent():
    for distance in (14.0, 2.0):
        a, b = far_pair(distance=distance)
        state = symmetrize([a, b], Symmetry.BOSE)
        rho0 = reduced_density(state, 0)
        rho1 = reduced_density(state, 1)
        assert rho0.distance(rho1) <= 1e-8
        assert rho0.trace() == pytest.approx(1.0, abs=1e-10)


def test_reduced_density_splits_evenly_for_distant_packets():
    a, b = far_pair()
    state = symmetrize([a, b], Symmetry.BOSE)
    lam = reduced_density(state, 0).eigenvalues()
    assert np.max(np.abs(lam - 0.5)) <= 1e-8


def test_reduced_density_spectrum_with_partial_overlap():
    # natural orbitals (a +- b) carry (1 +- s)^2 / (2 (1 + s^2)) each
    a, b = far_pair(distance=2.0)
    s = abs(overlap(a, b))
    state = symmetrize([a, b], Symmetry.BOSE)
    lam = np.sort(reduced_density(state, 0).eigenvalues())[::-1]
    expect = np.array([(1 + s) ** 2, (1 - s) ** 2]) / (2.0 * (1 + s * s))
    assert np.max(np.abs(lam - expect)) <= 1e-10
    assert lam.sum() == pytest.approx(1.0, abs=1e-10)


def test_reduced_density_matches_explicit_tensor_trace():
    """The packet-basis partial trace equals the dense grid computation."""
    g = Grid(-16.0, 16.0, 64)
    a = gaussian_packet(g, -3.0, 0.0, 1.0)
    b = gaussian_packet(g, +3.0, 0.0, 1.0)
    state = symmetrize([a, b], Symmetry.BOSE)
    rho = reduced_density(state, 0)

    psi = np.outer(a.amplitudes, b.amplitudes) + np.outer(b.amplitudes, a.amplitudes)
    psi /= math.sqrt(float(np.sum(np.abs(psi) ** 2)) * g.dx * g.dx)
    # psi psi^dagger dx^2 is the one-particle operator in the discrete basis
    dense = psi @ psi.conj().T * g.dx * g.dx
    dense_eigs = np.sort(np.linalg.eigvalsh(dense).real)[::-1]

    lam = rho.eigenvalues()
    assert np.max(np.abs(dense_eigs[:2] - lam)) <= 1e-8
    assert np.max(np.abs(dense_eigs[2:])) <= 1e-10

    _, funcs = rho.eigensystem()
    dense_vals, dense_vecs = np.linalg.eigh(dense)
    order = np.argsort(dense_vals)[::-1]
    for i in range(2):
        vec = dense_vecs[:, order[i]] / math.sqrt(g.dx)
        fid = abs(np.vdot(vec, funcs[i].amplitudes) * g.dx)
        assert fid == pytest.approx(1.0, abs=1e-6)


def test_density_operator_validation():
    a, b = far_pair()
    basis = [a, b]
    DensityOperator(basis, np.array([[0.6, 0.1], [0.1, 0.4]], dtype=complex))
    with pytest.raises(StateError):
        DensityOperator(basis, np.array([[0.6, 0.2], [0.0, 0.4]], dtype=complex))
    with pytest.raises(StateError):
        DensityOperator(basis, np.array([[0.3, 0.0], [0.0, 0.3]], dtype=complex))
    with pytest.raises(StateError):
        DensityOperator(basis, np.array([[1.5, 0.0], [0.0, -0.5]], dtype=complex))


def test_density_distance_is_a_sane_metric():
    a, b = far_pair()
    state = symmetrize([a, b], Symmetry.BOSE)
    rho = reduced_density(state, 0)
    assert rho.distance(rho) <= 1e-12
    near, far = far_pair(distance=2.0)
    other = reduced_density(symmetrize([near, far], Symmetry.BOSE), 0)
    assert rho.distance(other) > 0.1


# ----------------------------------------------------- packet recovery

def test_recovery_finds_distant_packets():
    a, b = far_pair(distance=12.0)
    state = symmetrize([a, b], Symmetry.BOSE)
    result = detect_particle_decomposition(state)
    assert result.packets is not None
    assert result.occupations == [1, 1]
    # singly occupied throughout; the flag marks multiple occupation
    assert not result.degenerate_occupation
    assert result.reconstruction_error <= 1e-6
    # canonical order is by position, left packet first
    assert result.packets[0].position_mean() < result.packets[1].position_mean()
    assert abs(overlap(result.packets[0], a)) >= 1.0 - 1e-6
    assert abs(overlap(result.packets[1], b)) >= 1.0 - 1e-6


def test_recovery_refuses_strongly_overlapping_packets():
    a, b = far_pair(distance=1.0)
    state = symmetrize([a, b], Symmetry.BOSE)
    result = detect_particle_decomposition(state)
    assert result.packets is None
    assert result.occupations == [2]
    assert result.degenerate_occupation


def test_recovery_is_start_independent():
    a, b = far_pair(distance=12.0)
    state = symmetrize([a, b], Symmetry.BOSE)
    base = detect_particle_decomposition(
        state, optimizer_rng=np.random.default_rng(0)).packets
    for j in range(1, 10):
        packs = detect_particle_decomposition(
            state, optimizer_rng=np.random.default_rng(j)).packets
        for mine, ref in zip(packs, base):
            assert abs(overlap(mine, ref)) >= 1.0 - 1e-8
            assert abs(np.angle(overlap(mine, ref))) <= 1e-6


def test_recovery_is_a_fixed_point():
    a, b = far_pair(distance=12.0)
    first = detect_particle_decomposition(symmetrize([a, b], Symmetry.BOSE))
    again = detect_particle_decomposition(
        symmetrize(first.packets, Symmetry.BOSE))
    for mine, ref in zip(again.packets, first.packets):
        assert abs(overlap(mine, ref)) >= 1.0 - 1e-8


def test_recovery_handles_sign_flipping_states():
    a, b = far_pair(distance=12.0)
    state = symmetrize([a, b], Symmetry.FERMI)
    result = detect_particle_decomposition(state)
    assert result.packets is not None
    assert result.occupations == [1, 1]
    assert abs(overlap(result.packets[0], a)) >= 1.0 - 1e-6
    assert abs(overlap(result.packets[1], b)) >= 1.0 - 1e-6


# ------------------------------------------------ orthogonality transport

def test_crossing_packets_stay_orthogonal():
    g = Grid(-40.0, 40.0, 2048)
    a = gaussian_packet(g, -7.0, +2.0, 1.0)
    b = gaussian_packet(g, +7.0, -2.0, 1.0)
    report = unitarity_orthogonality_check(a, b, FREE, 3.5)
    assert abs(report.before) <= 1e-8
    assert abs(report.after) <= 1e-8
    assert report.deviation <= 1e-8
    met = evolve(a, FREE, 3.5), evolve(b, FREE, 3.5)
    assert support_overlap(*met) >= 0.5


def test_orthogonality_deviation_reflects_unitarity_in_the_well():
    g = Grid(-20.0, 20.0, 1024)
    ham = HamiltonianSpec("harmonic", 1.0)
    a = gaussian_packet(g, -3.0, 0.0, 1.0)
    b = gaussian_packet(g, +3.0, 0.0, 1.0)
    report = unitarity_orthogonality_check(a, b, ham, 2.0)
    assert report.deviation <= 1e-8
