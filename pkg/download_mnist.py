"""
Fetch the MNIST IDX files.

    python download_mnist.py [target_dir]

The library never downloads data itself; point mnist.data_dir (or
--data-dir) at the directory this script fills.
"""
import os
import sys

import requests

MIRROR = 'https://storage.googleapis.com/cvdf-datasets/mnist/'
FILES = (
    'train-images-idx3-ubyte.gz',
    'train-labels-idx1-ubyte.gz',
    't10k-images-idx3-ubyte.gz',
    't10k-labels-idx1-ubyte.gz',
)


def download(target_dir: str) -> None:
    os.makedirs(target_dir, exist_ok=True)
    for filename in FILES:
        out_path = os.path.join(target_dir, filename)
        if os.path.exists(out_path):
            print(f"{filename} already exists, skipping.")
            continue
        print(f"Downloading {filename}...")
        response = requests.get(MIRROR + filename, timeout=60)
        response.raise_for_status()
        with open(out_path, 'wb') as f:
            f.write(response.content)
    print("All MNIST files downloaded to:", target_dir)


if __name__ == '__main__':
    download(sys.argv[1] if len(sys.argv) > 1 else os.path.join('data', 'mnist'))
