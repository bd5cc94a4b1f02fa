import numpy as np
import pytest

from conftest import random_density
from fermicool.noise import (
    NoiseSpec,
    depolarize,
    depolarize_sector_block,
    make_noise_channel,
    noise_threshold,
)


class TestDepolarize:
    def test_zero_strength_identity(self):
        rho = random_density(6, 0)
        assert np.allclose(depolarize(rho, 0.0), rho)

    def test_full_strength_maximally_mixed(self):
        rho = random_density(6, 1)
        assert np.allclose(depolarize(rho, 1.0), np.eye(6) / 6)

    @pytest.mark.parametrize("lam", [0.0, 0.1, 0.5, 0.9])
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_cptp(self, lam, seed):
        rho = random_density(8, seed, rank=3)
        out = depolarize(rho, lam)
        assert np.trace(out).real == pytest.approx(1.0, abs=1e-12)
        assert np.min(np.linalg.eigvalsh(out)) >= -1e-12
        assert np.max(np.abs(out - out.conj().T)) < 1e-12

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            NoiseSpec(-0.1)
        with pytest.raises(ValueError):
            NoiseSpec(0.1, "everywhere")


class TestSectorBlockView:
    def test_block_view_matches_full_space_computation(self):
        """Full-space depolarization computed densely agrees with the
        subnormalized sector-block shortcut."""
        rng = np.random.default_rng(4)
        full_dim, idx = 8, [1, 2, 4]  # 3-dim "sector" inside an 8-dim space
        block = random_density(3, 5)
        full = np.zeros((full_dim, full_dim), dtype=complex)
        full[np.ix_(idx, idx)] = block
        lam = 0.037
        dense = (1 - lam) * full + lam * np.eye(full_dim) / full_dim
        shortcut = depolarize_sector_block(block, lam, full_dim)
        assert np.allclose(dense[np.ix_(idx, idx)], shortcut, atol=1e-14)
        # repeated application stays consistent
        dense2 = (1 - lam) * dense + lam * np.eye(full_dim) / full_dim
        shortcut2 = depolarize_sector_block(shortcut, lam, full_dim)
        assert np.allclose(dense2[np.ix_(idx, idx)], shortcut2, atol=1e-14)

    def test_sector_scope_never_leaks(self):
        channel = make_noise_channel(NoiseSpec(0.2, "sector"), sector_dim=4, full_dim=16)
        rho = random_density(4, 7)
        out = channel(rho)
        assert np.trace(out).real == pytest.approx(1.0, abs=1e-12)
        assert np.min(np.linalg.eigvalsh(out)) >= -1e-12

    def test_full_scope_leaks_weight(self):
        channel = make_noise_channel(NoiseSpec(0.1, "full_space"), sector_dim=4, full_dim=16)
        rho = random_density(4, 8)
        out = channel(rho)
        # the sector keeps (1 - lam) + lam * 4/16 of the weight
        assert np.trace(out).real == pytest.approx(0.9 + 0.1 * 4 / 16, abs=1e-12)

    def test_none_spec_gives_no_channel(self):
        assert make_noise_channel(None, 4, 16) is None
        assert make_noise_channel(NoiseSpec(0.0), 4, 16) is None


class TestThreshold:
    def test_reference_value(self):
        assert noise_threshold(1.0, 1.0, 1.0, 1) == pytest.approx(4 / np.pi**2)

    def test_subspace_scaling(self):
        a = noise_threshold(1.0, 2.0, 100.0, 2)
        b = noise_threshold(1.0, 2.0, 100.0, 4)
        assert a / b == pytest.approx(16.0)

    def test_flagship_numbers(self, flagship):
        e = flagship["spectrum"].eigenvalues
        gap = e[1] - e[0]
        spread = e[-1] - e[0]
        threshold = noise_threshold(gap, spread, 100.0, 4)
        assert 0 < threshold < 1e-6  # tiny smallest-gap budget at W = 100

    def test_positive_inputs_required(self):
        with pytest.raises(ValueError):
            noise_threshold(0.0, 1.0, 1.0, 1)
