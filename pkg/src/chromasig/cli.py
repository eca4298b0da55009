"""Batch front end: CSV ingestion, diagram/signature/plot/synth commands.

Work is split into independent (file, combination) tasks consumed by a
configurable number of worker processes; outputs are assembled in a canonical
order so results are byte-identical for any worker count.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .complexes import InputError, LabelledPointCloud
from .geometry import chromatic_delcech
from .reduction import PersistenceDiagram, diagrams
from .signatures import (
    PACK_BLOCKS,
    SINGLE_BLOCKS,
    diagram_statistics,
    enumerate_combinations,
    statistics_layout,
    zero_signature,
)
from .sixpack import k_chromatic_gluing_map, six_pack
from . import synth
from .plotting import render_panels


class ParseError(InputError):
    pass


@dataclass
class RunConfig:
    max_combo: int = 3
    max_degree: int = 1
    min_species_size: int = 3
    cap_factor: float = 1.25
    plot_threshold: float = 0.05
    lift_scale: float = 1.0
    worker_count: int = 1
    species_universe: list[str] | None = None  # None: infer from union of inputs

    def validate(self) -> None:
        if self.max_combo not in (1, 2, 3):
            raise InputError("max_combo must be 1, 2, or 3")
        if self.max_degree not in (1, 2):
            raise InputError("max_degree must be 1 or 2")
        for name in ("min_species_size", "cap_factor", "plot_threshold",
                     "lift_scale", "worker_count"):
            if getattr(self, name) <= 0:
                raise InputError(f"{name} must be positive")

    def canonical_json(self) -> str:
        d = asdict(self)
        return json.dumps(d, sort_keys=True, separators=(",", ":"))

    def hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]


def ingest_csv(path, universe: list[str] | None = None) -> tuple[LabelledPointCloud, list[str]]:
    """Read a labelled point cloud from a CSV with header x,y[,z],label.

    Labels are remapped to contiguous indices (sorted label names); the name
    list is returned alongside.  Row order does not affect downstream output.
    """
    path = Path(path)
    if not path.exists():
        raise ParseError(f"{path}: file does not exist")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        cols = [h.strip().lower() for h in header]
        for required in ("x", "y", "label"):
            if required not in cols:
                raise ParseError(f"{path}: missing column {required!r} in header")
        xi, yi, li = cols.index("x"), cols.index("y"), cols.index("label")
        zi = cols.index("z") if "z" in cols else None
        pts = []
        names = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                coords = [float(row[xi]), float(row[yi])]
                if zi is not None:
                    coords.append(float(row[zi]))
            except (ValueError, IndexError):
                raise ParseError(f"{path}: line {lineno}: non-numeric coordinate") from None
            if not all(math.isfinite(c) for c in coords):
                raise ParseError(f"{path}: line {lineno}: non-finite coordinate")
            pts.append(coords)
            try:
                names.append(row[li].strip())
            except IndexError:
                raise ParseError(f"{path}: line {lineno}: missing label") from None
    if not pts:
        raise ParseError(f"{path}: no data rows")
    if universe is None:
        universe = sorted(set(names))
    name_to_id = {n: i for i, n in enumerate(universe)}
    try:
        labels = [name_to_id[n] for n in names]
    except KeyError as e:
        raise ParseError(f"{path}: label {e.args[0]!r} not in the species universe") from None
    cloud = LabelledPointCloud(np.array(pts), np.array(labels), species_count=len(universe))
    return cloud, list(universe)


def file_species(path) -> list[str]:
    """Distinct label names in a CSV, without building the cloud."""
    _, names = ingest_csv(path)
    return names


# ---------------------------------------------------------------------------
# per-combination computation (top level so worker processes can pickle it)


def _blocks_for_size(size: int):
    return SINGLE_BLOCKS if size == 1 else PACK_BLOCKS


def compute_combination(points, labels, species_count, combo, max_degree, cap_factor,
                        lift_scale, min_species_size):
    """Diagrams of one species combination of one cloud.

    Returns (status, payload): status "ok" with {diagram name: points, "cap": c}
    or "absent" when the combination is missing/undersized.
    """
    cloud = LabelledPointCloud(np.asarray(points), np.asarray(labels),
                               species_count=species_count)
    sizes = np.bincount(cloud.labels, minlength=species_count)
    for c in combo:
        if sizes[c] < min_species_size:
            return "absent", {}
    sub = cloud.restrict(combo)
    max_dim = max_degree + 1
    out: dict[str, list] = {}
    if len(combo) == 1:
        cx = chromatic_delcech(sub, max_dim, lift_scale)
        dgms = diagrams(cx, max_degree)
        named = {("domain", d): dgms[d] for d in range(max_degree + 1)}
        cap = cap_factor * max(cx.max_value, 1e-12)
    else:
        f = k_chromatic_gluing_map(sub, len(combo) - 1, max_dim, lift_scale)
        pack = six_pack(f, max_degree)
        named = {}
        for name in ("kernel", "image", "cokernel", "domain", "codomain"):
            for d, dgm in enumerate(getattr(pack, name)):
                named[(name, d)] = dgm
        cap = cap_factor * max(f.codomain.max_value, 1e-12)
    for name, deg, _layout in _blocks_for_size(len(combo)):
        out[f"{name}_deg{deg}"] = [list(p) for p in named[(name, deg)].points]
    return "ok", {"diagrams": out, "cap": cap}


def _run_task(args):
    file_idx, combo, points, labels, species_count, cfg = args
    try:
        status, payload = compute_combination(points, labels, species_count, combo, **cfg)
        return file_idx, combo, status, payload
    except Exception as e:  # batch isolation: a failure must not kill the pool
        return file_idx, combo, "error", {"message": f"{type(e).__name__}: {e}"}


def _run_batch(clouds, combos_per_file, config: RunConfig):
    """Run all (file, combination) tasks; returns {(file_idx, combo): result}."""
    cfg = dict(max_degree=config.max_degree, cap_factor=config.cap_factor,
               lift_scale=config.lift_scale, min_species_size=config.min_species_size)
    tasks = []
    for fi, cloud in enumerate(clouds):
        if cloud is None:
            continue
        for combo in combos_per_file[fi]:
            tasks.append((fi, combo, cloud.points, cloud.labels, cloud.species_count, cfg))
    results = {}
    if config.worker_count <= 1 or len(tasks) <= 1:
        for t in tasks:
            fi, combo, status, payload = _run_task(t)
            results[(fi, combo)] = (status, payload)
    else:
        with ProcessPoolExecutor(max_workers=config.worker_count) as pool:
            for fi, combo, status, payload in pool.map(_run_task, tasks, chunksize=1):
                results[(fi, combo)] = (status, payload)
    return results


# ---------------------------------------------------------------------------
# serialization helpers


def _json_points(points) -> list:
    return [[b, "inf" if d == math.inf else d] for b, d in points]


def _file_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def _resolve_universe(config: RunConfig, per_file_names: list[list[str] | None]) -> list[str]:
    if config.species_universe:
        return list(config.species_universe)
    union: set[str] = set()
    for names in per_file_names:
        if names:
            union.update(names)
    return sorted(union)


# ---------------------------------------------------------------------------
# commands


def cmd_diagrams(paths, out_dir, config: RunConfig) -> int:
    config.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    file_names: list[list[str] | None] = []
    errors: list[tuple[str, str]] = []
    for p in paths:
        try:
            _, ns = ingest_csv(p)
            file_names.append(ns)
        except Exception as e:
            file_names.append(None)
            errors.append((str(p), str(e)))
    universe = _resolve_universe(config, file_names)
    combos = enumerate_combinations(range(len(universe)), config.max_combo)
    clouds = []
    for p, ns in zip(paths, file_names):
        if ns is None:
            clouds.append(None)
            continue
        try:
            cloud, _ = ingest_csv(p, universe=universe)
            clouds.append(cloud)
        except Exception as e:
            clouds.append(None)
            errors.append((str(p), str(e)))
    results = _run_batch(clouds, [combos] * len(clouds), config)
    for fi, (p, cloud) in enumerate(zip(paths, clouds)):
        if cloud is None:
            continue
        records = []
        failed = False
        for combo in combos:
            status, payload = results[(fi, combo)]
            if status == "error":
                errors.append((str(p), f"combination {combo}: {payload['message']}"))
                failed = True
                break
            rec = {"labels": list(combo), "k": max(len(combo) - 1, 0)}
            if status == "absent":
                rec["absent"] = True
                rec["diagrams"] = {}
            else:
                # payload preserves pack order: kernel, image, cokernel (or domain)
                rec["diagrams"] = {name: _json_points(pts)
                                   for name, pts in payload["diagrams"].items()}
            records.append(rec)
        if failed:
            continue
        doc = {
            "input": Path(p).name,
            "input_hash": _file_hash(p),
            "config_hash": config.hash(),
            "species_universe": universe,
            "combinations": records,
        }
        out_path = out_dir / (Path(p).stem + ".diagrams.json")
        out_path.write_text(json.dumps(doc, indent=1, sort_keys=False) + "\n")
    for p, msg in errors:
        print(f"error: {p}: {msg}", file=sys.stderr)
    return 1 if errors else 0


def cmd_signature(paths, out_matrix, out_manifest, config: RunConfig) -> int:
    config.validate()
    file_names: list[list[str] | None] = []
    errors: list[tuple[str, str]] = []
    for p in paths:
        try:
            _, ns = ingest_csv(p)
            file_names.append(ns)
        except Exception as e:
            file_names.append(None)
            errors.append((str(p), str(e)))
    universe = _resolve_universe(config, file_names)
    combos = enumerate_combinations(range(len(universe)), config.max_combo)
    clouds = []
    for p, ns in zip(paths, file_names):
        if ns is None:
            clouds.append(None)
            continue
        try:
            cloud, _ = ingest_csv(p, universe=universe)
            clouds.append(cloud)
        except Exception as e:
            clouds.append(None)
            errors.append((str(p), str(e)))
    results = _run_batch(clouds, [combos] * len(clouds), config)

    manifest_rows = []
    for combo in combos:
        blocks = _blocks_for_size(len(combo))
        cname = "+".join(universe[c] for c in combo)
        for bname, deg, layout in blocks:
            for stat in statistics_layout(layout):
                manifest_rows.append((len(manifest_rows), cname, f"{bname}_deg{deg}", stat))

    rows = []
    for fi, (p, cloud) in enumerate(zip(paths, clouds)):
        if cloud is None:
            continue
        vec = []
        failed = False
        for combo in combos:
            status, payload = results[(fi, combo)]
            if status == "error":
                errors.append((str(p), f"combination {combo}: {payload['message']}"))
                failed = True
                break
            if status == "absent":
                vec.extend(zero_signature(combo).values.tolist())
            else:
                cap = payload["cap"]
                for bname, deg, layout in _blocks_for_size(len(combo)):
                    pts = tuple((b, d) for b, d in payload["diagrams"][f"{bname}_deg{deg}"])
                    dgm = PersistenceDiagram(deg, pts)
                    vec.extend(diagram_statistics(dgm, layout, cap).values.tolist())
        if not failed:
            rows.append((Path(p).name, vec))
    width = len(manifest_rows)
    with open(out_matrix, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["input"] + [f"f{i}" for i in range(width)])
        for name, vec in rows:
            assert len(vec) == width
            w.writerow([name] + [repr(v) for v in vec])
    if out_manifest:
        with open(out_manifest, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["column_index", "combo", "diagram", "statistic"])
            for row in manifest_rows:
                w.writerow(row)
    for p, msg in errors:
        print(f"error: {p}: {msg}", file=sys.stderr)
    return 1 if errors else 0


def cmd_plot(paths, out_dir, config: RunConfig) -> int:
    config.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    errors = []
    for p in paths:
        try:
            doc = json.loads(Path(p).read_text())
            for rec in doc["combinations"]:
                if rec.get("absent"):
                    continue
                combo = "-".join(str(c) for c in rec["labels"])
                panels = []
                for name, pts in rec["diagrams"].items():
                    panels.append((name, [(b, math.inf if d == "inf" else d)
                                          for b, d in pts]))
                svg = render_panels(panels, threshold=config.plot_threshold)
                out = out_dir / f"{Path(p).stem.replace('.diagrams', '')}_combo{combo}.svg"
                out.write_text(svg)
        except Exception as e:
            errors.append((str(p), f"{type(e).__name__}: {e}"))
    for p, msg in errors:
        print(f"error: {p}: {msg}", file=sys.stderr)
    return 1 if errors else 0


def cmd_synth(fixture, out_path, params) -> int:
    pts, labels = synth.generate(fixture, **params)
    with open(out_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "label"])
        for (x, y), l in zip(pts, labels):
            w.writerow([repr(float(x)), repr(float(y)), f"s{int(l)}"])
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_config_flags(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--max-combo", type=int, default=3)
    ap.add_argument("--max-degree", type=int, default=1)
    ap.add_argument("--min-species-size", type=int, default=3)
    ap.add_argument("--cap-factor", type=float, default=1.25)
    ap.add_argument("--plot-threshold", type=float, default=0.05)
    ap.add_argument("--lift-scale", type=float, default=1.0)
    ap.add_argument("--worker-count", type=int, default=1)
    ap.add_argument("--species-universe", type=str, default=None,
                    help="comma-separated label names; default: union of inputs")


def _config_from_args(args) -> RunConfig:
    universe = None
    if args.species_universe:
        universe = [s.strip() for s in args.species_universe.split(",") if s.strip()]
    return RunConfig(max_combo=args.max_combo, max_degree=args.max_degree,
                     min_species_size=args.min_species_size, cap_factor=args.cap_factor,
                     plot_threshold=args.plot_threshold, lift_scale=args.lift_scale,
                     worker_count=args.worker_count, species_universe=universe)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="chromasig",
                                     description="multi-species spatial signatures "
                                                 "from labelled point clouds")
    sub = parser.add_subparsers(dest="command", required=True)

    p_d = sub.add_parser("diagrams", help="persistence diagram packs as JSON")
    p_d.add_argument("inputs", nargs="+")
    p_d.add_argument("--out", required=True, help="output directory")
    _add_config_flags(p_d)

    p_s = sub.add_parser("signature", help="feature matrix CSV plus layout manifest")
    p_s.add_argument("inputs", nargs="+")
    p_s.add_argument("--out", required=True, help="output matrix CSV")
    p_s.add_argument("--manifest", default=None, help="output manifest CSV")
    _add_config_flags(p_s)

    p_p = sub.add_parser("plot", help="SVG plots from diagram JSON files")
    p_p.add_argument("inputs", nargs="+")
    p_p.add_argument("--out", required=True, help="output directory")
    _add_config_flags(p_p)

    p_y = sub.add_parser("synth", help="write a synthetic labelled cloud CSV")
    p_y.add_argument("fixture", choices=synth.FIXTURES)
    p_y.add_argument("--out", required=True)
    p_y.add_argument("--n", type=int, default=40)
    p_y.add_argument("--radius", type=float, default=1.0)
    p_y.add_argument("--noise", type=float, default=0.02)
    p_y.add_argument("--seed", type=int, default=0)
    p_y.add_argument("--colors", type=int, default=None)
    p_y.add_argument("--fill-n", type=int, default=None)
    p_y.add_argument("--loops", type=int, default=None)
    p_y.add_argument("--striped", action="store_true")
    p_y.add_argument("--extent", type=float, default=None)

    args = parser.parse_args(argv)
    try:
        if args.command == "synth":
            params = dict(n=args.n, radius=args.radius, noise=args.noise, seed=args.seed)
            for opt in ("colors", "fill_n", "loops", "extent"):
                v = getattr(args, opt)
                if v is not None:
                    params[opt] = v
            if args.striped:
                params["striped"] = True
            if args.fixture == "uniform_noise":
                params.pop("radius", None)
                params.pop("noise", None)
            return cmd_synth(args.fixture, args.out, params)
        config = _config_from_args(args)
        config.validate()
        if args.command == "diagrams":
            return cmd_diagrams(args.inputs, args.out, config)
        if args.command == "signature":
            return cmd_signature(args.inputs, args.out, args.manifest, config)
        if args.command == "plot":
            return cmd_plot(args.inputs, args.out, config)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
