"""Dataset ingestion, result persistence, and graph export.

Matrices and data travel as CSV (17 significant digits, lossless for
doubles), structured summaries as JSON with a schema field, and
selected graphs additionally as GraphML for external visualization.
"""

import csv
import json
import os

import numpy as np

from .dataset import Dataset, center_columns, standardize_columns
from .errors import EmptyGroup, ParseError, SchemaError

MANIFEST_SCHEMA = "multiggm-manifest-v1"
SIMILARITY_SCHEMA = "multiggm-similarity-v1"
META_SCHEMA = "multiggm-run-meta-v1"


def read_data_csv(path):
    """Read a headered numeric CSV; returns (matrix, column names)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        rows = []
        for r, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ParseError(
                    f"{path}: row {r} has {len(row)} cells, expected {len(header)}")
            vals = []
            for c, cell in enumerate(row):
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise ParseError(
                        f"{path}: non-numeric cell at row {r}, column "
                        f"{c + 1} ({header[c]!r}): {cell!r}") from None
            rows.append(vals)
    mat = np.array(rows, dtype=float) if rows else np.zeros((0, len(header)))
    return mat, header


def write_matrix_csv(path, mat, colnames):
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(colnames)
        for row in mat:
            writer.writerow([f"{v:.17g}" for v in row])


def load_dataset(manifest_path):
    """Load the per-(platform, group) matrices described by a JSON manifest."""
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    platforms = manifest.get("platforms")
    if not platforms:
        raise SchemaError(f"{manifest_path}: no platforms defined")
    options = manifest.get("options", {})
    center = options.get("center", True)
    standardize = options.get("standardize", False)
    base = os.path.dirname(os.path.abspath(manifest_path))

    group_names = [g["name"] for g in platforms[0]["groups"]]
    x, var_names, platform_names = [], [], []
    for plat in platforms:
        names = [g["name"] for g in plat["groups"]]
        if names != group_names:
            raise SchemaError(
                f"platform {plat['name']!r} has groups {names}, "
                f"expected {group_names} (same set, same order, on every platform)")
        mats, headers = [], None
        for grp in plat["groups"]:
            path = os.path.join(base, grp["csv_path"])
            mat, header = read_data_csv(path)
            if headers is None:
                headers = header
            elif header != headers:
                raise SchemaError(
                    f"platform {plat['name']!r}: column headers differ across groups")
            if mat.shape[0] < 2:
                raise EmptyGroup(
                    f"platform {plat['name']!r} group {grp['name']!r}: "
                    f"n={mat.shape[0]} < 2")
            if standardize:
                mat = standardize_columns(mat)
            elif center:
                mat = center_columns(mat)
            mats.append(mat)
        x.append(mats)
        var_names.append(headers)
        platform_names.append(plat["name"])
    return Dataset(x, platform_names=platform_names, group_names=group_names,
                   var_names=var_names)


def write_manifest(path, platform_names, group_names, csv_paths, options=None):
    """csv_paths[s][k] are paths relative to the manifest location."""
    manifest = {
        "schema": MANIFEST_SCHEMA,
        "platforms": [
            {"name": pn,
             "groups": [{"name": gn, "csv_path": csv_paths[s][k]}
                        for k, gn in enumerate(group_names)]}
            for s, pn in enumerate(platform_names)],
        "options": options or {"center": True, "standardize": False},
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2)


def _graphml(path, adj, var_names, mpp):
    import networkx as nx
    g = nx.Graph()
    for name in var_names:
        g.add_node(name)
    rows, cols = np.nonzero(np.triu(adj, 1))
    for i, j in zip(rows, cols):
        g.add_edge(var_names[i], var_names[j], mpp=float(mpp[i, j]))
    nx.write_graphml(g, path)


def write_results(summary, out_dir, meta=None):
    """Persist a posterior summary; returns the list of files written.

    Emits per-(platform, group) MPP matrices, selected edge lists, and
    GraphML graphs, plus a similarity JSON (relatedness MPPs and the
    posterior samples of nonzero similarity weights) and run metadata.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for s in range(summary.S):
        pn = summary.platform_names[s]
        names = summary.var_names[s]
        for k in range(summary.K):
            gn = summary.group_names[k]
            mpp = summary.edge_mpp[s][k]
            sel = summary.selected[s][k]
            path = os.path.join(out_dir, f"mpp_{pn}_{gn}.csv")
            write_matrix_csv(path, mpp, names)
            written.append(path)
            path = os.path.join(out_dir, f"edges_{pn}_{gn}.csv")
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["source", "target", "mpp"])
                rows, cols = np.nonzero(np.triu(sel, 1))
                for i, j in zip(rows, cols):
                    writer.writerow([names[i], names[j], f"{mpp[i, j]:.17g}"])
            written.append(path)
            path = os.path.join(out_dir, f"graph_{pn}_{gn}.graphml")
            _graphml(path, sel, names, mpp)
            written.append(path)

    def nonzero_samples(samples, idx):
        vals = samples[(slice(None),) + idx]
        return [float(v) for v in vals[vals != 0]]

    similarity = {
        "schema": SIMILARITY_SCHEMA,
        "platforms": summary.platform_names,
        "groups": summary.group_names,
        "gamma_mpp": {summary.platform_names[s]: summary.gamma_mpp[s].tolist()
                      for s in range(summary.S)},
        "zeta_mpp": summary.zeta_mpp.tolist(),
        "theta_samples": {
            f"{summary.platform_names[s]}:{summary.group_names[k]}"
            f"~{summary.group_names[m]}": nonzero_samples(summary.theta_samples,
                                                          (s, k, m))
            for s in range(summary.S)
            for k in range(summary.K) for m in range(k + 1, summary.K)},
        "phi_samples": {
            f"{summary.platform_names[s]}~{summary.platform_names[t]}":
                nonzero_samples(summary.phi_samples, (s, t))
            for s in range(summary.S) for t in range(s + 1, summary.S)},
    }
    path = os.path.join(out_dir, "similarity.json")
    with open(path, "w") as fh:
        json.dump(similarity, fh)
    written.append(path)

    meta = dict(meta or {})
    meta.setdefault("schema", META_SCHEMA)
    meta["platforms"] = summary.platform_names
    meta["groups"] = summary.group_names
    meta["threshold"] = summary.threshold
    meta["n_records"] = summary.n_records
    path = os.path.join(out_dir, "run_meta.json")
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, default=float)
    written.append(path)
    return written


def read_summary_dir(out_dir):
    """Reload MPP matrices and selected graphs written by write_results."""
    with open(os.path.join(out_dir, "run_meta.json")) as fh:
        meta = json.load(fh)
    with open(os.path.join(out_dir, "similarity.json")) as fh:
        similarity = json.load(fh)
    out = {"meta": meta, "similarity": similarity, "mpp": {}, "selected": {},
           "var_names": {}}
    threshold = meta.get("threshold", 0.5)
    for pn in meta["platforms"]:
        for gn in meta["groups"]:
            mpp, names = read_data_csv(os.path.join(out_dir, f"mpp_{pn}_{gn}.csv"))
            sel = np.zeros_like(mpp, dtype=np.int8)
            index = {n: i for i, n in enumerate(names)}
            with open(os.path.join(out_dir, f"edges_{pn}_{gn}.csv")) as fh:
                reader = csv.DictReader(fh)
                for row in reader:
                    i, j = index[row["source"]], index[row["target"]]
                    sel[i, j] = sel[j, i] = 1
            out["mpp"][(pn, gn)] = mpp
            out["selected"][(pn, gn)] = sel
            out["var_names"][(pn, gn)] = names
    out["threshold"] = threshold
    return out
