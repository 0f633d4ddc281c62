import numpy as np
import pytest

from vanetcap.highway import NetworkParams


def random_params(rng: np.random.Generator, p_low: float = 1e-3, p_high: float = 0.999) -> NetworkParams:
    """A valid scenario with every field drawn over a broad range."""
    r_i = rng.uniform(50.0, 1000.0)
    d = 2 * r_i + rng.uniform(10.0, 8000.0)
    return NetworkParams(
        road_length_m=d * int(rng.integers(1, 20)),
        infra_spacing_m=d,
        infra_radio_m=r_i,
        vehicle_radio_m=rng.uniform(20.0, 500.0),
        sensing_range_m=rng.uniform(20.0, 1500.0),
        density_east_per_m=10 ** rng.uniform(-4, -1),
        density_west_per_m=10 ** rng.uniform(-4, -1),
        voi_fraction=rng.uniform(p_low, p_high),
        speed_east_mps=rng.uniform(1.0, 60.0),
        speed_west_mps=rng.uniform(1.0, 60.0),
        v2i_rate_bps=10 ** rng.uniform(5, 9),
        v2v_rate_bps=10 ** rng.uniform(5, 9),
    )


@pytest.fixture
def desk():
    return NetworkParams()


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def chunked_quad(f, start: float, width: float, tol: float = 1e-16, max_chunks: int = 100_000) -> float:
    """Integrate ``f`` over ``[start, inf)`` as a sum of finite pieces.

    Long-tailed mixtures defeat a single infinite-range quadrature; pieces
    of a few scale lengths are integrated until one contributes below ``tol``
    after the bulk has been passed.
    """
    from scipy import integrate

    total = 0.0
    a = start
    for _ in range(max_chunks):
        piece = integrate.quad(f, a, a + width, limit=200, epsabs=0.0, epsrel=1e-13)[0]
        total += piece
        a += width
        if abs(piece) <= tol * max(abs(total), 1e-300) and a - start > 10 * width:
            return total
    raise RuntimeError("chunked_quad did not converge")
