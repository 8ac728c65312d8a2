import pytest

from jacbeam.geometry import ArrayConfig


@pytest.fixture(scope="session")
def cfg800():
    "Full-size array: 800 elements at lambda/2, 60 GHz."
    return ArrayConfig.half_wavelength(800, 60e9)


@pytest.fixture(scope="session")
def cfg64():
    return ArrayConfig.half_wavelength(64, 60e9)


@pytest.fixture(scope="session")
def cfg8():
    return ArrayConfig.half_wavelength(8, 60e9)
