#!/usr/bin/env python3
"""Regenerate the bundled task CSVs and their checksum manifest.

Writes data/<task>.csv (header row, feature columns, then one target
column) and data/manifest.json. Values are rendered with Python repr()
so they round-trip exactly through strtod.
"""
import hashlib
import json
import os

from sklearn import datasets


def fmt(v):
    f = float(v)
    if f == int(f) and abs(f) < 1e15:
        return str(int(f))
    return repr(f)


def write_csv(path, names, X, y, target_name="target"):
    lines = [",".join(list(names) + [target_name])]
    for row, t in zip(X, y):
        lines.append(",".join(fmt(v) for v in row) + "," + fmt(t))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def main():
    out = os.path.join(os.path.dirname(__file__), "..", "data")
    os.makedirs(out, exist_ok=True)

    iris = datasets.load_iris()
    wine = datasets.load_wine()
    bc = datasets.load_breast_cancer()
    dia = datasets.load_diabetes(scaled=False)

    tasks = {
        "iris-cls": (iris.feature_names, iris.data, iris.target),
        "wine-cls": (wine.feature_names, wine.data, wine.target),
        # The wine regression task predicts the cultivar label as a real
        # value; targets are standardized by the loader.
        "wine-reg": (wine.feature_names, wine.data, wine.target.astype(float)),
        "breast-cancer-cls": (bc.feature_names, bc.data, bc.target),
        "diabetes-reg": (dia.feature_names, dia.data, dia.target),
    }

    manifest = {"files": {}}
    for task, (names, X, y) in sorted(tasks.items()):
        path = os.path.join(out, task + ".csv")
        write_csv(path, names, X, y)
        blob = open(path, "rb").read()
        manifest["files"][task] = {
            "rows": int(X.shape[0]),
            "feature_columns": int(X.shape[1]),
            "sha256": hashlib.sha256(blob).hexdigest(),
        }

    with open(os.path.join(out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps(manifest, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
