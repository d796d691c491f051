"""Decompress a .gz file: gunzip.py SRC DST."""
import gzip
import shutil
import sys

with gzip.open(sys.argv[1], "rb") as src, open(sys.argv[2], "wb") as dst:
    shutil.copyfileobj(src, dst)
