import numpy as np
import pytest

from tailnet.formats import read_matrix, read_matrix_binary, read_matrix_csv, write_matrix_binary, write_matrix_csv
from tailnet.generators import DependenceScenario, RowLengthLaw, gen_matrix
from tailnet.heavy_tail import TailProfile


@pytest.fixture(params=[False, True], ids=["no-q", "with-q"])
def matrix(request):
    prof = TailProfile(((1.0, 0.5), (1.0, 0.5), (3.0, 1.0), (3.0, 1.0)))
    pers = {"kind": "pareto", "beta": 2.0} if request.param else None
    return gen_matrix(prof, DependenceScenario("independent", {1: 0.5, 2: 0.5}), 200, RowLengthLaw(1.5), seed=8, personalization=pers)


def _same(a, b):
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.lengths, b.lengths)
    assert (a.q is None) == (b.q is None)
    if a.q is not None:
        assert np.array_equal(a.q, b.q)
    assert a.profile == b.profile
    assert a.scenario == b.scenario
    assert a.d == b.d
    assert a.fingerprint() == b.fingerprint()


def test_binary_round_trip(tmp_path, matrix):
    write_matrix_binary(matrix, tmp_path / "m.smat")
    _same(matrix, read_matrix_binary(tmp_path / "m.smat"))
    _same(matrix, read_matrix(tmp_path / "m.smat"))


def test_csv_round_trip(tmp_path, matrix):
    write_matrix_csv(matrix, tmp_path / "m.csv")
    _same(matrix, read_matrix_csv(tmp_path / "m.csv"))
    _same(matrix, read_matrix(tmp_path / "m.csv"))


def test_binary_size_counts_active_cells(tmp_path, matrix):
    write_matrix_binary(matrix, tmp_path / "m.smat")
    size = (tmp_path / "m.smat").stat().st_size
    body = 40 + 8 * matrix.n_rows + 8 * int(matrix.lengths.sum()) + (8 * matrix.n_rows if matrix.q is not None else 0)
    assert size > body  # followed by the JSON metadata block


def test_binary_rejects_foreign_file(tmp_path):
    p = tmp_path / "junk.smat"
    p.write_bytes(b"NOTAMTRX" + bytes(64))
    with pytest.raises(ValueError):
        read_matrix_binary(p)
