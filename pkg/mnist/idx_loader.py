"""
IDX Loader

Reads the MNIST distribution files. Both files start with a big-endian
32-bit magic number (2051 for images, 2049 for labels) and an item count;
image files add the row and column counts. The payload is unsigned bytes.
Files compressed with gzip are read transparently.
"""

import gzip
import logging
import os
import struct
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from core.exceptions import ConfigurationError, IdxFormatError

logger = logging.getLogger(__name__)

MNIST_IMAGE_MAGIC = 2051
MNIST_LABEL_MAGIC = 2049

SPLIT_FILES = {
    'train': ('train-images-idx3-ubyte', 'train-labels-idx1-ubyte'),
    'test': ('t10k-images-idx3-ubyte', 't10k-labels-idx1-ubyte'),
}


@dataclass(frozen=True)
class Dataset:
    """Images (N x 784, pixels in [0, 1]), labels (N, digits 0-9) and the split tag."""
    images: np.ndarray
    labels: np.ndarray
    split: str = 'test'

    def __post_init__(self):
        if self.images.shape[0] != self.labels.shape[0]:
            raise IdxFormatError(f"{self.images.shape[0]} images but {self.labels.shape[0]} labels")

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.images.shape[1])

    def subset(self, indices: np.ndarray) -> 'Dataset':
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self.images[indices], self.labels[indices], self.split)


def _read_bytes(path: str) -> bytes:
    with open(path, 'rb') as f:
        data = f.read()
    if data[:2] == b'\x1f\x8b':
        data = gzip.decompress(data)
    return data


def _header(data: bytes, path: str, fields: int) -> Tuple[int, ...]:
    size = 4 * fields
    if len(data) < size:
        raise IdxFormatError(f"{path}: truncated file (header needs {size} bytes, got {len(data)})")
    return struct.unpack(f'>{fields}I', data[:size])


def _payload(data: bytes, path: str, offset: int, count: int) -> np.ndarray:
    available = len(data) - offset
    if available < count:
        raise IdxFormatError(f"{path}: truncated file (expected {count} bytes of data, got {available})")
    return np.frombuffer(data, dtype=np.uint8, count=count, offset=offset)


def read_idx_images(path: str) -> np.ndarray:
    """Raw images as uint8, shape (N, rows * cols)."""
    data = _read_bytes(path)
    magic, = _header(data, path, 1)
    if magic != MNIST_IMAGE_MAGIC:
        raise IdxFormatError(f"{path}: bad magic {magic:#010x}, expected {MNIST_IMAGE_MAGIC:#010x}")
    _, count, rows, cols = _header(data, path, 4)
    pixels = _payload(data, path, 16, count * rows * cols)
    return pixels.reshape(count, rows * cols)


def read_idx_labels(path: str) -> np.ndarray:
    """Raw labels as uint8, shape (N,)."""
    data = _read_bytes(path)
    magic, = _header(data, path, 1)
    if magic != MNIST_LABEL_MAGIC:
        raise IdxFormatError(f"{path}: bad magic {magic:#010x}, expected {MNIST_LABEL_MAGIC:#010x}")
    _, count = _header(data, path, 2)
    labels = _payload(data, path, 8, count)
    if labels.size and labels.max() > 9:
        raise IdxFormatError(f"{path}: label {labels.max()} outside 0-9")
    return labels


def load_idx(images_path: str, labels_path: str, split: str = 'test') -> Dataset:
    """
    Load an images/labels file pair.

    Args:
        images_path: IDX image file (optionally gzip-compressed)
        labels_path: IDX label file (optionally gzip-compressed)
        split: split tag stored on the dataset

    Returns:
        Dataset with pixels scaled by 1/255.
    """
    raw_images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if raw_images.shape[0] != labels.shape[0]:
        raise IdxFormatError(f"count mismatch: {raw_images.shape[0]} images in {images_path}, "
                             f"{labels.shape[0]} labels in {labels_path}")
    logger.info(f"Loaded {labels.shape[0]} {split} images from {images_path}")
    return Dataset(raw_images.astype(np.float64) / 255.0, labels.astype(np.int64), split)


def find_split_files(directory: str, split: str) -> Tuple[str, str]:
    """Locate the standard image/label file names (plain or .gz) of a split."""
    if split not in SPLIT_FILES:
        raise ConfigurationError(f"unknown MNIST split {split!r}")
    paths = []
    for name in SPLIT_FILES[split]:
        found: Optional[str] = None
        for candidate in (name, name + '.gz', name.replace('-idx', '.idx')):
            path = os.path.join(directory, candidate)
            if os.path.exists(path):
                found = path
                break
        if found is None:
            raise ConfigurationError(f"MNIST file {name} not found in {directory}")
        paths.append(found)
    return paths[0], paths[1]


def load_mnist(directory: str, split: str) -> Dataset:
    """Load the train or test split from a directory of standard MNIST files."""
    images_path, labels_path = find_split_files(directory, split)
    return load_idx(images_path, labels_path, split)
