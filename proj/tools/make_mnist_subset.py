#!/usr/bin/env python3
# Copyright 2026 The qrobust Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Convert the 5000-image MNIST sample shipped with mlxtend into gzipped IDX files.

Usage: make_mnist_subset.py [path/to/mnist_5k.csv.gz] [out_dir]

Without a path, the file is located through an installed ``mlxtend`` package.
"""
import gzip
import os
import struct
import sys

import numpy as np


def locate_csv():
    import mlxtend.data.mnist as m

    return m.DATA_PATH


def main(argv):
    csv = argv[1] if len(argv) > 1 else locate_csv()
    out = argv[2] if len(argv) > 2 else os.path.join(os.path.dirname(__file__), "..", "data")
    table = np.loadtxt(gzip.open(csv), delimiter=",")
    images = table[:, :-1].astype(np.uint8)
    labels = table[:, -1].astype(np.uint8)
    n = images.shape[0]
    os.makedirs(out, exist_ok=True)
    # mtime=0 keeps the archives byte-reproducible
    with gzip.GzipFile(os.path.join(out, "mnist5k-images-idx3-ubyte.gz"), "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 0x00000803, n, 28, 28))
        f.write(images.tobytes())
    with gzip.GzipFile(os.path.join(out, "mnist5k-labels-idx1-ubyte.gz"), "wb", mtime=0) as f:
        f.write(struct.pack(">II", 0x00000801, n))
        f.write(labels.tobytes())
    print(f"wrote {n} images to {out}; class counts {np.bincount(labels).tolist()}")


if __name__ == "__main__":
    main(sys.argv)
