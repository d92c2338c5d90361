import io as stdio
import json
from fractions import Fraction

import pytest

from ghr import io
from ghr.errors import InvalidMoments, InvalidSpec
from ghr.moments import MomentSequence, moments_of
from ghr.oracle import build_model


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


def test_moments_round_trip_exact(tmp_path):
    mu = MomentSequence.of([1, 0, Fraction(1, 3), Fraction(-2, 7), Fraction(5, 9)])
    path = write(tmp_path, "m.json", io.dump_moments(mu))
    back = io.load_moments(path)
    assert back == mu and back.exact


def test_moments_round_trip_real(tmp_path):
    mu = MomentSequence.of([1.0, 0.0, 0.1, 0.02, 0.3])
    back = io.load_moments(write(tmp_path, "m.json", io.dump_moments(mu)), backend="real")
    assert back.mu == mu.mu and not back.exact


def test_moments_string_entries(tmp_path):
    mu = io.load_moments(write(tmp_path, "m.json", {"mu": ["1", "0", "7/3"]}))
    assert mu.mu == (1, 0, Fraction(7, 3))


def test_moments_order_mismatch(tmp_path):
    with pytest.raises(InvalidMoments):
        io.load_moments(write(tmp_path, "m.json", {"order": 4, "mu": [1, 0, 1]}))


@pytest.mark.parametrize(
    "doc",
    ["{not json", {"kappa": [1]}, {"mu": [1, True]}, {"mu": [1, "x"]}, {"exact": True, "mu": [[1, 2, 3]]}],
)
def test_moments_bad_files(tmp_path, doc):
    with pytest.raises(InvalidSpec):
        io.load_moments(write(tmp_path, "m.json", doc))


def test_moments_stdin(monkeypatch):
    monkeypatch.setattr("sys.stdin", stdio.StringIO('{"order": 2, "mu": [1, 0, 2]}'))
    assert io.load_moments("-").mu == (1, 0, 2)


def test_cumulants_file(tmp_path):
    kappa = io.load_cumulants(write(tmp_path, "k.json", {"order": 3, "kappa": [0, 1, "1/2"]}))
    assert kappa.kappa == (0, 1, Fraction(1, 2))
    with pytest.raises(InvalidMoments):
        io.load_cumulants(write(tmp_path, "k2.json", {"order": 2, "kappa": [0, 1, 3]}))


def test_spectrum_file_probabilities(tmp_path):
    path = write(tmp_path, "s.json", [{"eigenvalue": 1, "probability": "1/2"}, {"eigenvalue": -1, "probability": "1/2"}])
    spec = io.load_spectrum(path)
    assert moments_of(spec, 4).mu == (1, 0, 1, 0, 1)
    model = build_model(io.load_spectrum_model(path))
    assert model.dim == 2 and model.mean_energy() == pytest.approx(0.0)


def test_spectrum_file_amplitudes(tmp_path):
    doc = {"levels": [{"eigenvalue": 0, "amplitude_re": 0.6}, {"eigenvalue": 2, "amplitude_im": 0.8}]}
    path = write(tmp_path, "s.json", doc)
    spec = io.load_spectrum(path, backend="real")
    assert [p for _, p in spec.levels] == pytest.approx([0.36, 0.64])
    assert build_model(io.load_spectrum_model(path)).state[1] == pytest.approx(0.8j)


@pytest.mark.parametrize("doc", [[], {"levels": 3}, [{"probability": 1}]])
def test_spectrum_bad_files(tmp_path, doc):
    with pytest.raises(InvalidSpec):
        io.load_spectrum(write(tmp_path, "s.json", doc))


def test_negative_probability_model(tmp_path):
    with pytest.raises(InvalidSpec):
        io.load_spectrum_model(write(tmp_path, "s.json", [{"eigenvalue": 0, "probability": -1}]))
