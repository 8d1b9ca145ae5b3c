"""Binary checkpoint format and the metrics table."""

import csv

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from rnacc import (
    FormatError,
    MetricsRow,
    NumericalFailure,
    RnaConfig,
    read_checkpoint_dir,
    read_checkpoints,
    rna,
    write_checkpoints,
    write_metrics,
)
from rnacc.checkpoint import _HEADER, MAGIC, VERSION


def test_f64_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    seq = rng.standard_normal((5, 3)) * 10.0 ** rng.integers(-30, 30, size=(5, 3))
    path = tmp_path / "seq.rnac"
    write_checkpoints(path, seq, "f64")
    back = read_checkpoints(path)
    assert back.dtype == np.float64
    np.testing.assert_array_equal(back, seq)


def test_f32_round_trip_within_f32_precision(tmp_path):
    rng = np.random.default_rng(1)
    seq = rng.standard_normal((4, 7))
    path = tmp_path / "seq32.rnac"
    write_checkpoints(path, seq, "f32")
    back = read_checkpoints(path)
    np.testing.assert_array_equal(back, seq.astype(np.float32).astype(np.float64))


def test_bad_magic(tmp_path):
    path = tmp_path / "bad.rnac"
    payload = np.zeros(4).tobytes()
    path.write_bytes(_HEADER.pack(b"XXXX", VERSION, 8, 2, 2) + payload)
    with pytest.raises(FormatError, match="magic"):
        read_checkpoints(path)


def test_bad_version_and_width(tmp_path):
    path = tmp_path / "v.rnac"
    path.write_bytes(_HEADER.pack(MAGIC, 9, 8, 1, 1) + np.zeros(1).tobytes())
    with pytest.raises(FormatError, match="version"):
        read_checkpoints(path)
    path.write_bytes(_HEADER.pack(MAGIC, VERSION, 2, 1, 1) + np.zeros(1).tobytes())
    with pytest.raises(FormatError, match="width"):
        read_checkpoints(path)


def test_truncated_payload(tmp_path):
    # Header promises 10 iterates, payload carries 9.
    path = tmp_path / "short.rnac"
    path.write_bytes(_HEADER.pack(MAGIC, VERSION, 8, 3, 10) + np.zeros(27).tobytes())
    with pytest.raises(FormatError, match="payload"):
        read_checkpoints(path)


def test_trailing_bytes_rejected(tmp_path):
    path = tmp_path / "long.rnac"
    write_checkpoints(path, np.ones((2, 2)))
    path.write_bytes(path.read_bytes() + b"\x00")
    with pytest.raises(FormatError, match="payload"):
        read_checkpoints(path)


def test_nan_payload_rejected(tmp_path):
    path = tmp_path / "nan.rnac"
    payload = np.array([1.0, np.nan]).tobytes()
    path.write_bytes(_HEADER.pack(MAGIC, VERSION, 8, 2, 1) + payload)
    with pytest.raises(NumericalFailure):
        read_checkpoints(path)
    with pytest.raises(NumericalFailure):
        write_checkpoints(tmp_path / "out.rnac", np.array([[np.inf, 0.0]]))


def test_header_too_short(tmp_path):
    path = tmp_path / "tiny.rnac"
    path.write_bytes(b"RN")
    with pytest.raises(FormatError):
        read_checkpoints(path)


@given(
    hnp.arrays(
        dtype=np.float64,
        shape=hnp.array_shapes(min_dims=2, max_dims=2, min_side=1, max_side=6),
        elements=st.floats(
            min_value=-1e300, max_value=1e300, allow_nan=False, allow_infinity=False
        ),
    )
)
def test_round_trip_property(tmp_path_factory, seq):
    path = tmp_path_factory.mktemp("rt") / "seq.rnac"
    write_checkpoints(path, seq, "f64")
    np.testing.assert_array_equal(read_checkpoints(path), seq)


def test_directory_loader_lexicographic(tmp_path):
    rng = np.random.default_rng(3)
    parts = [rng.standard_normal((2, 4)) for _ in range(3)]
    for name, part in zip(("b.rnac", "a.rnac", "c.rnac"), parts):
        write_checkpoints(tmp_path / name, part)
    merged = read_checkpoint_dir(tmp_path)
    np.testing.assert_array_equal(merged, np.vstack([parts[1], parts[0], parts[2]]))


def test_directory_loader_manifest_override(tmp_path):
    rng = np.random.default_rng(4)
    parts = [rng.standard_normal((1, 3)) for _ in range(2)]
    write_checkpoints(tmp_path / "a.rnac", parts[0])
    write_checkpoints(tmp_path / "b.rnac", parts[1])
    (tmp_path / "manifest.txt").write_text("# newest first\nb.rnac\na.rnac\n")
    merged = read_checkpoint_dir(tmp_path)
    np.testing.assert_array_equal(merged, np.vstack([parts[1], parts[0]]))


def test_directory_loader_errors(tmp_path):
    with pytest.raises(FormatError, match="no checkpoint files"):
        read_checkpoint_dir(tmp_path)
    write_checkpoints(tmp_path / "a.rnac", np.ones((1, 2)))
    write_checkpoints(tmp_path / "b.rnac", np.ones((1, 3)))
    with pytest.raises(FormatError, match="disagree"):
        read_checkpoint_dir(tmp_path)
    (tmp_path / "manifest.txt").write_text("missing.rnac\n")
    with pytest.raises(FormatError, match="missing"):
        read_checkpoint_dir(tmp_path)


def test_file_and_memory_extrapolation_agree_bitwise(tmp_path):
    rng = np.random.default_rng(6)
    seq = rng.standard_normal((12, 9))
    cfg = RnaConfig(window=10, lam=1e-8)
    in_memory, _ = rna(seq, cfg)
    path = tmp_path / "seq.rnac"
    write_checkpoints(path, seq, "f64")
    from_disk, _ = rna(read_checkpoints(path), cfg)
    np.testing.assert_array_equal(in_memory, from_disk)


# ------------------------------------------------------------------ metrics


def _rows():
    return [
        MetricsRow(1, 0.5, 1.25, 0.5, 1.25, None),
        MetricsRow(2, 0.1 + 0.2, 1e-300, -0.25, 3.0, 1e-8),
        MetricsRow(3, np.pi, np.e, 1.0 / 3.0, 2.0 / 3.0, 1.0000000000000002),
    ]


def test_metrics_line_count(tmp_path):
    path = tmp_path / "m.csv"
    write_metrics(path, _rows())
    lines = path.read_text().splitlines()
    assert len(lines) == 4
    assert lines[0] == "epoch,objective,grad_norm,objective_rna,grad_norm_rna,lambda_used"


def test_metrics_empty_rows_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    write_metrics(path, [])
    assert path.read_text().splitlines() == [
        "epoch,objective,grad_norm,objective_rna,grad_norm_rna,lambda_used"
    ]


def test_metrics_round_trip_exact(tmp_path):
    # 17 significant digits reproduce every float64 exactly.
    path = tmp_path / "rt.csv"
    rows = _rows()
    write_metrics(path, rows)
    with open(path, newline="") as fh:
        parsed = list(csv.DictReader(fh))
    assert len(parsed) == len(rows)
    for row, rec in zip(rows, parsed):
        assert int(rec["epoch"]) == row.epoch
        assert float(rec["objective"]) == row.objective
        assert float(rec["grad_norm"]) == row.grad_norm
        assert float(rec["objective_rna"]) == row.objective_rna
        assert float(rec["grad_norm_rna"]) == row.grad_norm_rna
        if row.lambda_used is None:
            assert rec["lambda_used"] == ""
        else:
            assert float(rec["lambda_used"]) == row.lambda_used
