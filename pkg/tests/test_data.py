"""IDX parsing, synthetic datasets, batch selection.

Header layouts are built by hand with struct.pack so the parser is checked
against the byte format itself, not against the writer.
"""

import gzip
import struct

import numpy as np
import pytest

from ska import data


def images_bytes(n, rows, cols, payload=None):
    if payload is None:
        payload = bytes((i * 7) % 256 for i in range(n * rows * cols))
    return struct.pack(">IIII", 2051, n, rows, cols) + payload


def labels_bytes(values):
    return struct.pack(">II", 2049, len(values)) + bytes(values)


# ------------------------------------------------------------------ load ---


def test_load_images_hand_built_header(tmp_path):
    raw = struct.pack(">IIII", 2051, 1, 2, 2) + bytes([0, 255, 0, 255])
    p = tmp_path / "img.idx"
    p.write_bytes(raw)
    out = data.load_idx_images(p)
    np.testing.assert_array_equal(out, [[0.0, 1.0, 0.0, 1.0]])


def test_load_labels_hand_built_header(tmp_path):
    p = tmp_path / "lab.idx"
    p.write_bytes(labels_bytes([7, 0, 9]))
    np.testing.assert_array_equal(data.load_idx_labels(p), [7, 0, 9])


def test_gzip_transparent(tmp_path):
    p = tmp_path / "img.idx.gz"
    with gzip.open(p, "wb") as fh:
        fh.write(images_bytes(2, 3, 3))
    out = data.load_idx_images(p)
    assert out.shape == (2, 9)


def test_label_range_check(tmp_path):
    p = tmp_path / "lab.idx"
    p.write_bytes(labels_bytes([3, 12]))
    with pytest.raises(data.LabelRangeError):
        data.load_idx_labels(p, classes=10)
    assert data.load_idx_labels(p, classes=13).tolist() == [3, 12]


def test_bad_magic(tmp_path):
    p = tmp_path / "img.idx"
    p.write_bytes(struct.pack(">IIII", 2052, 1, 2, 2) + bytes(4))
    with pytest.raises(data.BadMagicError):
        data.load_idx_images(p)
    # label magic on an image load is also wrong
    p.write_bytes(struct.pack(">IIII", 2049, 1, 2, 2) + bytes(4))
    with pytest.raises(data.BadMagicError):
        data.load_idx_images(p)


def test_truncated_header_and_payload(tmp_path):
    p = tmp_path / "img.idx"
    p.write_bytes(struct.pack(">II", 2051, 1))
    with pytest.raises(data.TruncatedFileError):
        data.load_idx_images(p)
    p.write_bytes(struct.pack(">IIII", 2051, 2, 2, 2) + bytes(5))
    with pytest.raises(data.TruncatedFileError):
        data.load_idx_images(p)


def test_dimension_overflow(tmp_path):
    p = tmp_path / "img.idx"
    p.write_bytes(struct.pack(">IIII", 2051, 2**31, 2**20, 2**20))
    with pytest.raises(data.DimensionOverflowError):
        data.load_idx_images(p)


def test_trailing_bytes_rejected(tmp_path):
    p = tmp_path / "img.idx"
    p.write_bytes(images_bytes(1, 2, 2) + b"\x00")
    with pytest.raises(data.IdxFormatError):
        data.load_idx_images(p)


# ----------------------------------------------------------------- write ---


def test_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(21)
    pixels = rng.integers(0, 256, size=(5, 4, 3), dtype=np.uint8)
    labels = rng.integers(0, 10, size=5, dtype=np.uint8)
    ip, lp = tmp_path / "img.idx", tmp_path / "lab.idx"
    data.save_idx_images(ip, pixels)
    data.save_idx_labels(lp, labels)
    back = (data.load_idx_images(ip) * 255.0).round().astype(np.uint8)
    np.testing.assert_array_equal(back.reshape(5, 4, 3), pixels)
    np.testing.assert_array_equal(data.load_idx_labels(lp), labels)
    # header bytes are exactly the documented big-endian words
    raw = ip.read_bytes()
    assert raw[:16] == struct.pack(">IIII", 2051, 5, 4, 3)


def test_save_validations(tmp_path):
    with pytest.raises(ValueError):
        data.save_idx_images(tmp_path / "x.idx", np.zeros((2, 2)))
    with pytest.raises(ValueError):
        data.save_idx_labels(tmp_path / "x.idx", np.array([[1]]))
    with pytest.raises(ValueError):
        data.save_idx_labels(tmp_path / "x.idx", np.array([300]))


# --------------------------------------------------------------- Dataset ---


def test_dataset_validation():
    ds = data.Dataset(np.array([[0.0, 1.0], [0.5, 0.25]]))
    assert ds.n == 2 and ds.dim == 2
    with pytest.raises(ValueError, match="2-D"):
        data.Dataset(np.zeros(3))
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        data.Dataset(np.array([[1.5, 0.0]]))
    with pytest.raises(ValueError, match="labels"):
        data.Dataset(np.zeros((3, 2)), labels=np.array([1, 2]))


def test_from_idx_limit(tmp_path):
    pixels = np.arange(6 * 4, dtype=np.uint8).reshape(6, 2, 2)
    labels = np.arange(6, dtype=np.uint8)
    ip, lp = tmp_path / "i.idx", tmp_path / "l.idx"
    data.save_idx_images(ip, pixels)
    data.save_idx_labels(lp, labels)
    ds = data.from_idx(ip, lp, limit=4)
    assert ds.n == 4
    assert ds.labels.tolist() == [0, 1, 2, 3]
    assert ds.source == "mnist-file"


def test_synthetic_blobs_structure():
    ds = data.synthetic_blobs(60, 5, 3, seed=9)
    assert ds.n == 60 and ds.dim == 5
    assert ds.inputs.min() >= 0.0 and ds.inputs.max() <= 1.0
    assert ds.labels.tolist() == [i % 3 for i in range(60)]
    # class means sit apart: within-class spread is far below between-class
    means = np.stack([ds.inputs[ds.labels == c].mean(axis=0) for c in range(3)])
    for a in range(3):
        for b in range(a + 1, 3):
            assert np.linalg.norm(means[a] - means[b]) > 0.3
    # deterministic in the seed
    again = data.synthetic_blobs(60, 5, 3, seed=9)
    np.testing.assert_array_equal(ds.inputs, again.inputs)
    assert not np.array_equal(ds.inputs, data.synthetic_blobs(60, 5, 3, seed=10).inputs)


def test_synthetic_blobs_rejects_impossible_spacing():
    with pytest.raises(ValueError, match="cannot place"):
        data.synthetic_blobs(10, 2, 40, seed=0, center_spacing=0.9)


def test_constant_dataset():
    ds = data.constant_dataset(3, 2, 0.75)
    np.testing.assert_array_equal(ds.inputs, np.full((3, 2), 0.75))
    with pytest.raises(ValueError):
        data.constant_dataset(0, 2)


def test_glyph_images_deterministic_and_bounded():
    px, lb = data.glyph_images(30, seed=5)
    assert px.shape == (30, 28, 28) and px.dtype == np.uint8
    assert lb.tolist() == [i % 10 for i in range(30)]
    px2, _ = data.glyph_images(30, seed=5)
    np.testing.assert_array_equal(px, px2)
    assert not np.array_equal(px, data.glyph_images(30, seed=6)[0])
    # mostly background, some ink
    ink = float(np.mean(px > 64))
    assert 0.05 < ink < 0.4


def test_glyph_idx_files_load_through_parser(tmp_path):
    ip, lp = tmp_path / "g.idx.gz", tmp_path / "gl.idx.gz"
    data.write_glyph_idx(ip, lp, 40, seed=3)
    ds = data.from_idx(ip, lp)
    ref = data.glyph_dataset(40, seed=3)
    np.testing.assert_array_equal(ds.inputs, ref.inputs)
    np.testing.assert_array_equal(ds.labels, ref.labels)


# ------------------------------------------------------------ take_batch ---


def test_take_batch_full_is_stable_prefix():
    ds = data.Dataset(np.linspace(0, 1, 12).reshape(6, 2))
    b0 = data.take_batch(ds, None, "full", 0)
    b9 = data.take_batch(ds, None, "full", 9)
    np.testing.assert_array_equal(b0, ds.inputs)
    np.testing.assert_array_equal(b0, b9)
    np.testing.assert_array_equal(data.take_batch(ds, 2, "full", 5), ds.inputs[:2])


def test_take_batch_cyclic_wraps():
    ds = data.Dataset(np.arange(10).reshape(5, 2) / 10.0)
    b0 = data.take_batch(ds, 2, "cyclic", 0)
    b1 = data.take_batch(ds, 2, "cyclic", 1)
    b2 = data.take_batch(ds, 2, "cyclic", 2)
    np.testing.assert_array_equal(b0, ds.inputs[[0, 1]])
    np.testing.assert_array_equal(b1, ds.inputs[[2, 3]])
    # k=2 starts at row 4 and wraps to row 0
    np.testing.assert_array_equal(b2, ds.inputs[[4, 0]])
    # period is n / gcd(size, n) batches; after 5 steps of size 2 it repeats
    np.testing.assert_array_equal(data.take_batch(ds, 2, "cyclic", 5), b0)


def test_take_batch_errors():
    ds = data.Dataset(np.zeros((4, 2)))
    with pytest.raises(ValueError):
        data.take_batch(ds, 9, "full", 0)
    with pytest.raises(ValueError):
        data.take_batch(ds, 0, "full", 0)
    with pytest.raises(ValueError):
        data.take_batch(ds, 2, "shuffled", 0)
