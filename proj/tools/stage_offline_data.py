#!/usr/bin/env python3
"""Stage UCI dataset files from locally obtainable copies.

`marcsinh fetch` downloads the manifest URLs directly from the UCI archive.
On machines without access to archive.ics.uci.edu this script rebuilds the
same files, in the same layout and under the same names, from copies that
ship inside Python packages:

  * scikit-learn's bundled CSVs: iris, wine, breast cancer (WDBC)
  * keel_ds (PyPI): optdigits and pendigits, stored as train ++ test in the
    original row order
  * imbalanced_databases (PyPI): the original german.data-numeric and
    SPECTF.train / SPECTF.test files

Datasets with no faithful offline copy (heart failure, Parkinson's,
Haberman in original row order, Wi-Fi localization, Coimbra) are reported
and left for `marcsinh fetch`.

Usage: stage_offline_data.py [--dest DIR] [--wheels DIR]
"""

import argparse
import gzip
import os
import subprocess
import sys
import tempfile
import zipfile

OPTDIGITS_TRAIN_ROWS = 3823
PENDIGITS_TRAIN_ROWS = 7494


def sklearn_data_dir():
    import sklearn

    return os.path.join(os.path.dirname(sklearn.__file__), "datasets", "data")


def read_sklearn_csv(name):
    with open(os.path.join(sklearn_data_dir(), name)) as f:
        header = f.readline().strip().split(",")
        rows = [line.strip().split(",") for line in f if line.strip()]
    return header[2:], rows


def write_lines(path, lines):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", newline="\n") as f:
        for line in lines:
            f.write(line + "\n")
    print(f"  wrote {path} ({len(lines)} rows)")


def stage_iris(dest):
    names, rows = read_sklearn_csv("iris.csv")
    # UCI labels are "Iris-setosa" etc., last column.
    lines = [",".join(r[:-1] + ["Iris-" + names[int(r[-1])]]) for r in rows]
    write_lines(os.path.join(dest, "iris", "iris.data"), lines)


def stage_wine(dest):
    _, rows = read_sklearn_csv("wine_data.csv")
    # UCI wine.data carries the cultivar (1..3) in the first column.
    lines = [",".join([str(int(r[-1]) + 1)] + r[:-1]) for r in rows]
    write_lines(os.path.join(dest, "wine", "wine.data"), lines)


def stage_wdbc(dest):
    _, rows = read_sklearn_csv("breast_cancer.csv")
    # The bundled copy has no patient IDs. The ID column is dropped on load,
    # so the row number stands in for it.
    diagnosis = {0: "M", 1: "B"}
    lines = [
        ",".join([str(i + 1), diagnosis[int(r[-1])]] + r[:-1])
        for i, r in enumerate(rows)
    ]
    write_lines(os.path.join(dest, "wdbc", "wdbc.data"), lines)


def download_wheel(package, wheels):
    for f in os.listdir(wheels):
        if f.startswith(package) and f.endswith(".whl"):
            return os.path.join(wheels, f)
    subprocess.check_call(
        [sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d", wheels, package]
    )
    return download_wheel(package, wheels)


def keel_rows(wheel, member):
    text = zipfile.ZipFile(wheel).read(member).decode()
    return [
        ",".join(v.strip() for v in line.split(","))
        for line in text.splitlines()
        if line.strip() and not line.startswith("@")
    ]


def stage_keel(dest, wheels):
    wheel = download_wheel("keel_ds", wheels)
    opt = keel_rows(wheel, "keel_ds/data/balanced/raw/optdigits.dat")
    pen = keel_rows(wheel, "keel_ds/data/balanced/raw/penbased.dat")
    if len(opt) != 5620 or len(pen) != 10992:
        raise SystemExit("unexpected keel_ds row counts")

    # The bundled scikit-learn digits table is optdigits.tes verbatim; use it
    # to confirm the train ++ test ordering before splitting.
    with gzip.open(os.path.join(sklearn_data_dir(), "digits.csv.gz"), "rt") as f:
        digits = [
            ",".join(str(int(float(v))) for v in line.strip().split(","))
            for line in f
            if line.strip()
        ]
    if opt[OPTDIGITS_TRAIN_ROWS:] != digits:
        raise SystemExit("keel_ds optdigits tail does not match optdigits.tes")

    write_lines(os.path.join(dest, "optdigits", "optdigits.tra"), opt[:OPTDIGITS_TRAIN_ROWS])
    write_lines(os.path.join(dest, "optdigits", "optdigits.tes"), opt[OPTDIGITS_TRAIN_ROWS:])
    write_lines(os.path.join(dest, "digits", "optdigits.tes"), opt[OPTDIGITS_TRAIN_ROWS:])
    write_lines(os.path.join(dest, "pendigits", "pendigits.tra"), pen[:PENDIGITS_TRAIN_ROWS])
    write_lines(os.path.join(dest, "pendigits", "pendigits.tes"), pen[PENDIGITS_TRAIN_ROWS:])


def stage_original_files(dest, wheels):
    wheel = zipfile.ZipFile(download_wheel("imbalanced_databases", wheels))
    members = {
        "imbalanced_databases/data/german/german.data-numeric.txt": ("german", "german.data-numeric"),
        "imbalanced_databases/data/spect_f/SPECTF.train.txt": ("spectf", "SPECTF.train"),
        "imbalanced_databases/data/spect_f/SPECTF.test.txt": ("spectf", "SPECTF.test"),
    }
    for member, (entry, filename) in members.items():
        path = os.path.join(dest, entry, filename)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "wb") as f:
            f.write(wheel.read(member))
        print(f"  wrote {path}")


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dest", default=os.path.join(here, "..", "data", "uci"))
    parser.add_argument("--wheels", default=None, help="cache directory for downloaded wheels")
    args = parser.parse_args()

    dest = os.path.abspath(args.dest)
    print(f"staging into {dest}")
    stage_iris(dest)
    stage_wine(dest)
    stage_wdbc(dest)

    with tempfile.TemporaryDirectory() as tmp:
        wheels = args.wheels or tmp
        os.makedirs(wheels, exist_ok=True)
        stage_keel(dest, wheels)
        stage_original_files(dest, wheels)

    print("not staged (run `marcsinh fetch`): heart_failure, parkinsons, haberman, wifi, coimbra")


if __name__ == "__main__":
    main()
