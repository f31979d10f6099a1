import pytest

from fraclab.core import QuadratureSpec
from fraclab.heatflow import heat_kernel_fourier


@pytest.fixture(scope="session")
def q5():
    return QuadratureSpec(abs_tol=1e-5)


@pytest.fixture(scope="session")
def kernel_tables():
    """Unit-time kernel tables for the three standard orders."""
    return {s: heat_kernel_fourier(s) for s in (0.25, 0.5, 0.75)}
