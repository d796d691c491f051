#!/usr/bin/env python3
"""Extract the 5,000-row MNIST sample bundled in the mlxtend wheel.

Writes a gzipped CSV with header p0..p783,label. Fetches the wheel with pip
when --wheel is not given.
"""
import argparse
import csv
import gzip
import io
import pathlib
import subprocess
import sys
import tempfile
import zipfile

MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"


def find_wheel(explicit):
    if explicit:
        return pathlib.Path(explicit)
    tmp = pathlib.Path(tempfile.mkdtemp())
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "mlxtend==0.24.0", "--no-deps", "-q", "-d", str(tmp)],
        check=True,
    )
    return next(tmp.glob("mlxtend-*.whl"))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--wheel", help="path to an mlxtend wheel")
    parser.add_argument("--out", default="data/mnist_5k.csv.gz")
    args = parser.parse_args()

    with zipfile.ZipFile(find_wheel(args.wheel)) as wheel:
        raw = gzip.decompress(wheel.read(MEMBER)).decode()

    rows = list(csv.reader(io.StringIO(raw)))
    if len(rows) != 5000 or any(len(r) != 785 for r in rows):
        sys.exit("unexpected shape in " + MEMBER)

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([f"p{i}" for i in range(784)] + ["label"])
    for r in rows:
        writer.writerow([str(int(float(v))) for v in r])
    with open(args.out, "wb") as f:
        f.write(gzip.compress(out.getvalue().encode(), mtime=0))
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
