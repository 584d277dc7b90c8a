import json

import numpy as np
import pytest

from radsim.errors import ParameterError, ParseError, ShapeError
from radsim.signals import (SampledSignal, read_signal, read_signal_csv, sidecar_path,
                            write_signal, write_signal_csv)


def random_signal(seed=0, n=257, rate=48000.0, start=0.125):
    rng = np.random.default_rng(seed)
    return SampledSignal(rate, rng.standard_normal(n), start)


class TestValidation:
    def test_rate_positive(self):
        with pytest.raises(ParameterError):
            SampledSignal(0.0, np.zeros(4))

    def test_finite_samples(self):
        with pytest.raises(ParameterError):
            SampledSignal(1.0, np.array([0.0, np.inf]))

    def test_one_dimensional(self):
        with pytest.raises(ShapeError):
            SampledSignal(1.0, np.zeros((2, 2)))

    def test_duration_and_times(self):
        sig = SampledSignal(10.0, np.zeros(5), start_time=1.0)
        assert sig.duration == 0.5
        assert np.allclose(sig.times(), [1.0, 1.1, 1.2, 1.3, 1.4])


class TestRawFormat:
    def test_round_trip_bit_exact(self, tmp_path):
        sig = random_signal()
        path = tmp_path / "sig.f64"
        write_signal(sig, path)
        again = read_signal(path)
        assert again.sample_rate == sig.sample_rate
        assert again.start_time == sig.start_time
        assert np.array_equal(again.samples, sig.samples)

    def test_truncated_payload(self, tmp_path):
        sig = random_signal(n=16)
        path = tmp_path / "sig.f64"
        write_signal(sig, path)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(ParseError, match="expected"):
            read_signal(path)

    def test_bad_sidecar_json(self, tmp_path):
        sig = random_signal(n=8)
        path = tmp_path / "sig.f64"
        write_signal(sig, path)
        sidecar_path(path).write_text("{not json")
        with pytest.raises(ParseError):
            read_signal(path)

    def test_missing_metadata_key(self, tmp_path):
        sig = random_signal(n=8)
        path = tmp_path / "sig.f64"
        write_signal(sig, path)
        meta = json.loads(sidecar_path(path).read_text())
        del meta["sample_rate"]
        sidecar_path(path).write_text(json.dumps(meta))
        with pytest.raises(ParseError, match="sample_rate"):
            read_signal(path)

    def test_unknown_format_tag(self, tmp_path):
        sig = random_signal(n=8)
        path = tmp_path / "sig.f64"
        write_signal(sig, path)
        meta = json.loads(sidecar_path(path).read_text())
        meta["format"] = "f32be"
        sidecar_path(path).write_text(json.dumps(meta))
        with pytest.raises(ParseError, match="format"):
            read_signal(path)


class TestCsvFormat:
    def test_round_trip_bit_exact(self, tmp_path):
        sig = random_signal(seed=3, n=100)
        path = tmp_path / "sig.csv"
        write_signal_csv(sig, path)
        again = read_signal_csv(path)
        assert again.sample_rate == sig.sample_rate
        assert again.start_time == sig.start_time
        assert np.array_equal(again.samples, sig.samples)

    def test_missing_metadata(self, tmp_path):
        path = tmp_path / "sig.csv"
        path.write_text("time,value\n0.0,1.0\n")
        with pytest.raises(ParseError, match="metadata"):
            read_signal_csv(path)

    def test_bad_row(self, tmp_path):
        path = tmp_path / "sig.csv"
        path.write_text("# sample_rate=10.0\n# start_time=0.0\ntime,value\n0.0,zap\n")
        with pytest.raises(ParseError, match="row"):
            read_signal_csv(path)
