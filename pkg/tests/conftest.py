import numpy as np
import pytest

from fermicool.couplers import (
    diagonalize_quadratic,
    free_couplers,
    resolve_degenerate_ground,
)
from fermicool.lattice import (
    LatticeSpec,
    SectorSpec,
    build_free,
    build_hubbard,
    fock_matrix,
    sector_basis,
)
from fermicool.qcore import eigh


@pytest.fixture(scope="session")
def dimer():
    """1x2 Hubbard instance, sector (1, 1): the smallest nontrivial model."""
    spec = LatticeSpec(1, 2, 1.0, 2.0)
    basis = sector_basis(2, SectorSpec(1, 1))
    h = fock_matrix(build_hubbard(spec), basis)
    return {
        "spec": spec,
        "basis": basis,
        "h": h,
        "spectrum": eigh(h),
    }


@pytest.fixture(scope="session")
def flagship():
    """2x2 Hubbard at half filling, t = 1, U = 2: the reference instance."""
    spec = LatticeSpec(2, 2, 1.0, 2.0)
    basis = sector_basis(4, SectorSpec(2, 2))
    h = fock_matrix(build_hubbard(spec), basis)
    h_free = fock_matrix(build_free(spec), basis)
    bog = diagonalize_quadratic(build_free(spec))
    ground = resolve_degenerate_ground(bog, basis, spec)
    return {
        "spec": spec,
        "basis": basis,
        "h": h,
        "h_free": h_free,
        "spectrum": eigh(h),
        "bog": bog,
        "ground": ground,
    }


@pytest.fixture(scope="session")
def flagship_free_couplers(flagship):
    return free_couplers(
        flagship["bog"], flagship["basis"], ground=flagship["ground"]
    )


def random_state(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, seed: int, rank: int | None = None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    k = rank or dim
    a = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    rho = a @ a.conj().T
    return rho / np.trace(rho)
