"""Dataset construction: synthetic sphere data and two-class binary loaders.

Synthetic rows are normalized Gaussians, resampled until pairwise
non-parallel.  The binary loaders understand IDX (big-endian, magics
0x00000801 / 0x00000803) and the CIFAR-10 binary layout (3073-byte
records); pixels are scaled to [0, 1] and each row normalized to unit norm.
"""

import logging
import struct

import numpy as np

from ..errors import FormatError, GenerationError, RejectedInputError
from ..model import Dataset
from ..numerics import sample_normal, sample_rademacher

log = logging.getLogger(__name__)

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801
CIFAR_RECORD = 3073
PARALLEL_TOL = 1e-6
MAX_RETRIES = 1000


def gen_synthetic(n, d, rng):
    """n unit-sphere rows in d dimensions with i.i.d. +-1 labels.

    Any candidate row with |dot| >= 1 - 1e-6 against an accepted row is
    resampled, up to 1000 attempts per row.
    """
    n, d = int(n), int(d)
    if n < 2 or d < 2:
        raise RejectedInputError("need n >= 2 and d >= 2")
    X = np.zeros((n, d))
    for i in range(n):
        for _ in range(MAX_RETRIES):
            v = sample_normal(rng, d)
            nrm = np.linalg.norm(v)
            if nrm == 0.0:
                continue
            x = v / nrm
            if i == 0 or np.max(np.abs(X[:i] @ x)) < 1.0 - PARALLEL_TOL:
                X[i] = x
                break
        else:
            raise GenerationError(
                "could not place row %d after %d retries (n too large for d=%d?)"
                % (i, MAX_RETRIES, d)
            )
    y = sample_rademacher(rng, n)
    return Dataset(np.ascontiguousarray(X), y)


def _read_idx_images(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 16:
        raise FormatError("%s: truncated IDX image header at byte %d (need 16)" % (path, len(blob)))
    magic, count, rows, cols = struct.unpack_from(">IIII", blob, 0)
    if magic != IDX_IMAGE_MAGIC:
        raise FormatError("%s: bad image magic 0x%08x at byte 0 (expected 0x%08x)"
                          % (path, magic, IDX_IMAGE_MAGIC))
    need = 16 + count * rows * cols
    if len(blob) < need:
        raise FormatError("%s: truncated at byte %d (expected %d bytes)" % (path, len(blob), need))
    pixels = np.frombuffer(blob, dtype=np.uint8, count=count * rows * cols, offset=16)
    return pixels.reshape(count, rows * cols)


def _read_idx_labels(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 8:
        raise FormatError("%s: truncated IDX label header at byte %d (need 8)" % (path, len(blob)))
    magic, count = struct.unpack_from(">II", blob, 0)
    if magic != IDX_LABEL_MAGIC:
        raise FormatError("%s: bad label magic 0x%08x at byte 0 (expected 0x%08x)"
                          % (path, magic, IDX_LABEL_MAGIC))
    need = 8 + count
    if len(blob) < need:
        raise FormatError("%s: truncated at byte %d (expected %d bytes)" % (path, len(blob), need))
    return np.frombuffer(blob, dtype=np.uint8, count=count, offset=8)


def _read_cifar_bin(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    n_rec, leftover = divmod(len(blob), CIFAR_RECORD)
    if leftover:
        raise FormatError("%s: truncated record at byte %d (record size %d)"
                          % (path, n_rec * CIFAR_RECORD, CIFAR_RECORD))
    if n_rec == 0:
        raise FormatError("%s: empty file (no %d-byte records)" % (path, CIFAR_RECORD))
    arr = np.frombuffer(blob, dtype=np.uint8).reshape(n_rec, CIFAR_RECORD)
    return arr[:, 0], arr[:, 1:]


def _build_subset(labels, pixels, class_a, class_b, n_max, source):
    keep = []
    for i, lab in enumerate(labels):
        if lab == class_a or lab == class_b:
            keep.append(i)
            if len(keep) >= n_max:
                break
    keep = np.array(keep, dtype=np.int64)
    for cls in (class_a, class_b):
        if keep.size == 0 or not np.any(labels[keep] == cls):
            raise FormatError("%s: class %d absent (scanned %d records)"
                              % (source, cls, len(labels)))

    X = pixels[keep].astype(np.float64) / 255.0
    y = np.where(labels[keep] == class_a, 1.0, -1.0)

    norms = np.linalg.norm(X, axis=1)
    nz = norms > 0.0
    if not np.all(nz):
        log.warning("%s: dropping %d all-zero instance(s)", source, int(np.sum(~nz)))
        X, y, norms = X[nz], y[nz], norms[nz]
    X = X / norms[:, None]

    kept = np.zeros_like(X)
    kept_labels = []
    count = 0
    dropped = 0
    for row, lab in zip(X, y):
        if count and np.max(np.abs(kept[:count] @ row)) >= 1.0 - PARALLEL_TOL:
            dropped += 1
            continue
        kept[count] = row
        kept_labels.append(lab)
        count += 1
    if dropped:
        log.warning("%s: dropped %d duplicate/parallel instance(s)", source, dropped)
    return Dataset(np.ascontiguousarray(kept[:count]), np.asarray(kept_labels))


def load_idx_subset(images_path, labels_path, class_a, class_b, n_max):
    pixels = _read_idx_images(images_path)
    labels = _read_idx_labels(labels_path)
    if pixels.shape[0] != labels.shape[0]:
        raise FormatError("%s / %s: image count %d != label count %d"
                          % (images_path, labels_path, pixels.shape[0], labels.shape[0]))
    return _build_subset(labels, pixels, class_a, class_b, n_max, images_path)


def load_cifar_subset(path, class_a, class_b, n_max):
    labels, pixels = _read_cifar_bin(path)
    return _build_subset(labels, pixels, class_a, class_b, n_max, path)


def load_binary_subset(fmt, images_path, labels_path, class_a, class_b, n_max):
    """Dispatch on the container format: "IDX" or "CIFAR_BIN"."""
    fmt = fmt.upper()
    if fmt == "IDX":
        return load_idx_subset(images_path, labels_path, class_a, class_b, n_max)
    if fmt == "CIFAR_BIN":
        return load_cifar_subset(images_path, class_a, class_b, n_max)
    raise RejectedInputError("format must be IDX or CIFAR_BIN")
