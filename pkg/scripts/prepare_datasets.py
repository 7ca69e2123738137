#!/usr/bin/env python3
"""
Rebuild the small benchmark CSVs under ``data/`` from copies that ship inside
PyPI wheels, for machines that cannot reach the UCI repository directly.

    zoo.csv            Orange3   Orange/datasets/zoo.tab         (animal name dropped)
    ionosphere.csv     Orange3   Orange/tests/datasets/ionosphere.tab
    sonar.csv          keel-ds   keel_ds/data/balanced/raw/sonar.dat  (KEEL rounds to 3 decimals)
    breast_cancer.csv  scikit-learn load_breast_cancer()

Every output has a header row and the class label in the last column.

Usage
-----
    python scripts/prepare_datasets.py [--out data] [--wheel-dir /tmp/wheels]
"""

import argparse
import csv
import glob
import io
import os
import subprocess
import sys
import zipfile


def _wheel(wheel_dir, project):
    pattern = os.path.join(wheel_dir, f"{project.replace('-', '_')}-*.whl")
    hits = sorted(glob.glob(pattern)) or sorted(glob.glob(pattern.lower()))
    if not hits:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", project, "--no-deps",
             "--only-binary", ":all:", "-d", wheel_dir, "-q"],
            check=True,
        )
        hits = sorted(glob.glob(pattern)) or sorted(glob.glob(pattern.lower()))
    if not hits:
        raise SystemExit(f"no wheel for {project} in {wheel_dir}")
    return hits[-1]


def _read_member(wheel, member):
    with zipfile.ZipFile(wheel) as zf:
        return zf.read(member).decode("utf-8")


def _write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path}: {len(rows)} rows x {len(header) - 1} features")


def _orange_tab(text, drop=()):
    # Orange .tab: names, types, flags, then data rows
    lines = text.splitlines()
    names = lines[0].split("\t")
    rows = [ln.split("\t") for ln in lines[3:] if ln.strip()]
    keep = [i for i, n in enumerate(names) if n not in drop]
    return [names[i] for i in keep], [[r[i].strip() for i in keep] for r in rows]


def build_zoo(wheel, out):
    header, rows = _orange_tab(_read_member(wheel, "Orange/datasets/zoo.tab"), drop=("name",))
    _write(os.path.join(out, "zoo.csv"), header, rows)


def build_ionosphere(wheel, out):
    header, rows = _orange_tab(_read_member(wheel, "Orange/tests/datasets/ionosphere.tab"))
    _write(os.path.join(out, "ionosphere.csv"), header, rows)


def build_sonar(wheel, out):
    text = _read_member(wheel, "keel_ds/data/balanced/raw/sonar.dat")
    rows = []
    for row in csv.reader(io.StringIO(text)):
        if not row or row[0].startswith("@"):
            continue
        rows.append([c.strip() for c in row])
    header = [f"a{i + 1}" for i in range(len(rows[0]) - 1)] + ["class"]
    _write(os.path.join(out, "sonar.csv"), header, rows)


def build_breast_cancer(out):
    from sklearn.datasets import load_breast_cancer

    bunch = load_breast_cancer()
    names = ["malignant" if t == 0 else "benign" for t in bunch.target]
    header = [n.replace(" ", "_") for n in bunch.feature_names] + ["diagnosis"]
    rows = [[repr(float(v)) for v in x] + [lab] for x, lab in zip(bunch.data, names)]
    _write(os.path.join(out, "breast_cancer.csv"), header, rows)


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--out", default="data")
    parser.add_argument("--wheel-dir", default=os.path.join(os.getcwd(), ".wheels"))
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)
    os.makedirs(args.wheel_dir, exist_ok=True)

    orange = _wheel(args.wheel_dir, "Orange3")
    keel = _wheel(args.wheel_dir, "keel-ds")
    build_zoo(orange, args.out)
    build_ionosphere(orange, args.out)
    build_sonar(keel, args.out)
    build_breast_cancer(args.out)


if __name__ == "__main__":
    main()
