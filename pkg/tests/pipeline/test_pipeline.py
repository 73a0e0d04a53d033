"""Tests for the pipeline module."""

import pickle
import shutil
import tempfile
from pathlib import Path

import pytest

from src.config import ConfigError, RunConfig
from src.pipeline.pipeline import (
    REPORT_SCHEMA,
    PipelineError,
    estimate_labels,
    load_text,
    resolve_params,
    run_edm,
    strip_fasta,
)
from src.protocol import ProtocolError


class TestPipelineError:
    """Tests for PipelineError exception."""

    def test_error_stores_stage_and_message(self):
        """PipelineError stores stage and message correctly."""
        error = PipelineError("load", "file missing")
        assert error.stage == "load"
        assert error.message == "file missing"
        assert str(error) == "[load] file missing"

    def test_error_pickles(self):
        """PipelineError survives the trip back from a worker process."""
        error = pickle.loads(pickle.dumps(PipelineError("parse", "bad")))
        assert (error.stage, error.message) == ("parse", "bad")


class TestLoadText:
    """Tests for load_text and strip_fasta."""

    def setup_method(self):
        """Create temp directory."""
        self.temp_dir = tempfile.mkdtemp()

    def teardown_method(self):
        """Clean up temp directory."""
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_raw_bytes(self):
        """Files are read byte for byte."""
        path = Path(self.temp_dir) / "a.txt"
        path.write_bytes(b"ACGT\n")
        assert load_text(path) == b"ACGT\n"

    def test_fasta(self):
        """Headers and whitespace are dropped in FASTA mode."""
        path = Path(self.temp_dir) / "a.fa"
        path.write_bytes(b">seq1 sample\nACGT\nAC GT\n;comment\nTT\n")
        assert load_text(path, fasta=True) == b"ACGTACGTTT"

    def test_missing_file(self):
        """An unreadable file is a load error."""
        with pytest.raises(PipelineError) as exc:
            load_text(Path(self.temp_dir) / "nope.txt")
        assert exc.value.stage == "load"

    def test_empty_file(self):
        """An empty input has nothing to compare."""
        path = Path(self.temp_dir) / "empty.fa"
        path.write_bytes(b">only a header\n")
        with pytest.raises(PipelineError) as exc:
            load_text(path, fasta=True)
        assert "no symbols" in exc.value.message

    def test_strip_fasta(self):
        """strip_fasta keeps sequence characters only."""
        assert strip_fasta(b"> h\n A C\r\nG\n") == b"ACG"


class TestResolveParams:
    """Tests for parameter resolution."""

    def test_estimate(self):
        """The estimate counts both parties' distinct labels."""
        assert estimate_labels(b"aaaa", b"aaaa") == 6

    def test_table_modulus(self):
        """Short inputs use the smallest tabulated modulus."""
        params = resolve_params(RunConfig(), b"ACGT", b"TGCA")
        assert params.modulus == 1031
        assert params.n_cap == 1031
        assert params.message_bound == 1031 + (1031 << 30)

    def test_invariant_violation(self):
        """A message bound below n_cap + R is a configuration error."""
        with pytest.raises(ConfigError) as exc:
            resolve_params(RunConfig(message_bound=1000), b"ACGT", b"TGCA")
        assert exc.value.stage == "message_bound"


class TestRunEdm:
    """End-to-end runs in process."""

    def test_swapped_halves(self):
        """'aabb' and 'bbaa' are at L1 distance 2."""
        report = run_edm(b"aabb", b"bbaa", RunConfig(seed=1, modulus=1031))
        assert report.l1 == 2
        assert report.n == 6
        assert report.metrics.rounds == 5

    def test_report_lines(self):
        """The report starts with the schema and names the run."""
        lines = run_edm(b"ACGT", b"ACGA", RunConfig(seed=1)).lines()
        items = dict(line.split("=", 1) for line in lines)
        assert lines[0] == f"schema={REPORT_SCHEMA}"
        assert items["command"] == "edm"
        assert items["mode"] == "secure"
        assert items["m"] == "1031"
        assert items["rounds"] == "5"
        assert "bytes.phase1.A.0x01" in items
        assert not any(key.startswith("time.") for key in items)

    def test_phase1_mode(self):
        """Labeling alone reports no distance."""
        report = run_edm(b"ACGT", b"ACGA", RunConfig(seed=1), mode="phase1")
        assert report.l1 is None
        assert not any(line.startswith("l1=") for line in report.lines())
        assert report.metrics.rounds == 3

    def test_naive_mode(self):
        """The naive baseline runs L1 over all m labels."""
        report = run_edm(b"aabb", b"bbaa", RunConfig(seed=1, modulus=1031), mode="naive")
        assert report.l1 == 2
        assert report.n == 1031
        assert report.metrics.rounds_by_phase == {"phase2": 2}

    def test_timings_on_request(self):
        """Phase timings are opt-in."""
        report = run_edm(b"ACGT", b"ACGA", RunConfig(seed=1))
        assert any(line.startswith("time.phase1=") for line in report.lines(include_timings=True))

    def test_protocol_failure_surfaces(self):
        """A party-side failure reaches the caller as a ProtocolError."""
        config = RunConfig(seed=1, n_cap=2, pad_queries=True)
        with pytest.raises(ProtocolError) as exc:
            run_edm(b"ACGTACGT", b"ACGA", config)
        assert exc.value.stage == "pad"

    def test_socket_transport_matches_inproc(self):
        """Both transports produce the same report for the same seed."""
        inproc = run_edm(b"GATTACA", b"TACAGAT", RunConfig(seed=3)).lines()
        sockets = run_edm(b"GATTACA", b"TACAGAT", RunConfig(seed=3, transport="socket")).lines()
        assert sockets == inproc
