import numpy as np
import pytest

from polylat.cbc import cbc_construct_product
from polylat.discrepancy import mean_square_criterion
from polylat.sobol import DirectionFileError, load_direction_table, parse_direction_text, sobol_points
from polylat.weights import preset

SMALL = "d s a m_i\n2 1 0 1\n3 2 1 1 3\n4 3 1 1 3 1\n"


def test_parse_small_table():
    dt = parse_direction_text(SMALL)
    assert dt.n_dims == 4
    assert dt.entries[0].m_init == (1,)
    assert dt.entries[1].a == 1 and dt.entries[1].m_init == (1, 3)


@pytest.mark.parametrize(
    "text,line",
    [
        ("d s a m_i\n2 1 0 1\n3 2 1 1\n", 3),
        ("d s a m_i\n2 1 0 2\n", 2),
        ("d s a m_i\n2 1 0 1\n3 2 1 1 5\n", 3),
        ("d s a m_i\n2 1 x 1\n", 2),
        ("d s a m_i\n3 1 0 1\n", 2),
        ("d s a m_i\n2 1 0\n", 2),
    ],
)
def test_parse_errors_name_line(text, line):
    with pytest.raises(DirectionFileError) as info:
        parse_direction_text(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_insufficient_dimensions(tmp_path):
    path = tmp_path / "short.txt"
    path.write_text(SMALL)
    with pytest.raises(DirectionFileError):
        load_direction_table(path)
    assert load_direction_table(path, min_dims=4).n_dims == 4


def test_canonical_file(joe_kuo_file):
    dt = load_direction_table(joe_kuo_file)
    assert dt.n_dims == 21201
    assert joe_kuo_file.read_text().splitlines()[1].split() == ["2", "1", "0", "1"]
    assert dt.entries[0].m_init == (1,)


def test_first_dimension_is_van_der_corput():
    ps = sobol_points(parse_direction_text(SMALL), 3, 1)
    assert ps.as_float()[:4, 0].tolist() == [0.0, 0.5, 0.25, 0.75]


def test_each_coordinate_is_a_permutation(joe_kuo_file):
    dt = load_direction_table(joe_kuo_file)
    for m in (1, 5, 12):
        ps = sobol_points(dt, m, 20)
        for j in range(20):
            assert sorted(ps.numerators[:, j].tolist()) == list(range(1 << m))


def test_matches_scipy(joe_kuo_file):
    qmc = pytest.importorskip("scipy.stats.qmc")
    dt = load_direction_table(joe_kuo_file)
    ref = qmc.Sobol(30, scramble=False).random(1 << 10)
    np.testing.assert_array_equal(sobol_points(dt, 10, 30, order="gray").as_float(), ref)


@pytest.mark.parametrize("m", [1, 4, 10])
def test_gray_and_direct_same_set(joe_kuo_file, m):
    dt = load_direction_table(joe_kuo_file)
    a = sobol_points(dt, m, 8).numerators
    b = sobol_points(dt, m, 8, order="gray").numerators
    assert sorted(map(tuple, a.tolist())) == sorted(map(tuple, b.tolist()))
    w = preset("geo09", 8)
    assert mean_square_criterion(sobol_points(dt, m, 8), w) == pytest.approx(
        mean_square_criterion(sobol_points(dt, m, 8, order="gray"), w), rel=1e-12
    )


def test_one_dimension_equals_lattice_rule(joe_kuo_file):
    dt = load_direction_table(joe_kuo_file)
    for m in range(1, 16):
        for name in ("unweighted", "geo09"):
            w = preset(name, 1)
            assert mean_square_criterion(sobol_points(dt, m, 1), w) == cbc_construct_product(m, 1, w.gammas).B[0]
    assert f"{mean_square_criterion(sobol_points(dt, 4, 1), preset('unweighted', 1)):.2E}" == "6.51E-04"


def test_range_errors():
    dt = parse_direction_text(SMALL)
    with pytest.raises(ValueError):
        sobol_points(dt, 32, 1)
    with pytest.raises(ValueError):
        sobol_points(dt, 4, 5)
    with pytest.raises(ValueError):
        sobol_points(dt, 4, 2, order="random")
