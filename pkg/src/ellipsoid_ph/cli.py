"""Command-line interface: ``ellipsoid-ph <subcommand> ...``.

Exit codes: 0 success, 1 check failure, 2 usage error, 3 data error,
4 numerical error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .complex import build_ellipsoid_edges, nesting_violations
from .descriptors import confusion_counts, loo_nn_classify, top_lifespans
from .estimators import EllipsoidPersistence, RipsPersistence
from .exceptions import EllipsoidPHError, InvalidArgument, NumericalError
from .geometry import SolverConfig
from .persistence import Barcode, compute_persistence
from .pointcloud import (
    HOLE_COUNTS,
    TRANSFORM_KINDS,
    TransformSpec,
    apply_transformation,
    generate_circle,
    generate_disk_with_holes,
    generate_dog_bone,
    generate_figure_eight,
    load_point_cloud,
    save_point_cloud,
)
from .render import render_barcode_svg
from .tangent import RatioSpec, construct_ellipsoids

log = logging.getLogger("ellipsoid_ph")

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3, 4

SHAPES = ("circle", "figure-eight", "dogbone", "holes")


class UsageError(InvalidArgument):
    pass


def _provenance(argv: Sequence[str]) -> list:
    return [f"ellipsoid_ph {__version__}", "argv: " + " ".join(argv)]


def _int_list(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_complex_flags(p: argparse.ArgumentParser, kind_flag: bool = True) -> None:
    if kind_flag:
        p.add_argument("--complex", dest="kind", choices=("ellipsoid", "rips"), default="ellipsoid")
    p.add_argument("--k", type=int, default=5, help="neighbours used for local PCA")
    p.add_argument("--q", type=float, default=3.0, help="tangent / normal semi-axis ratio")
    p.add_argument("--intrinsic-dim", type=int, default=1, help="number of tangent axes")
    p.add_argument("--ratios", type=_float_list, default=None, help='explicit axis ratios "r1,r2,..."')
    p.add_argument("--rmax", type=float, default=None, help="filtration cap (radius convention)")
    p.add_argument("--dmax", type=int, default=None, help="largest simplex dimension (default max-degree + 1)")
    p.add_argument("--max-degree", type=int, default=1, help="largest homology degree")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--tol-lambda", type=float, default=1e-9)
    p.add_argument("--tol-radius", type=float, default=1e-7)
    p.add_argument("--seed", type=int, default=0)


def _estimator(args, kind: Optional[str] = None):
    kind = kind or args.kind
    if kind == "rips":
        return RipsPersistence(rmax=args.rmax, max_degree=args.max_degree, dmax=args.dmax).fit()
    return EllipsoidPersistence(
        k=args.k, q=args.q, intrinsic_dim=args.intrinsic_dim, ratios=args.ratios, rmax=args.rmax,
        max_degree=args.max_degree, dmax=args.dmax, lambda_tol=args.tol_lambda,
        radius_rel_tol=args.tol_radius, n_jobs=args.threads,
    ).fit()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ellipsoid-ph", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic point cloud")
    g.add_argument("shape", choices=SHAPES)
    g.add_argument("--n", type=int, default=100)
    g.add_argument("--radius", type=float, default=1.0, help="circle radius")
    g.add_argument("--scale", type=float, default=1.0, help="figure-eight scale")
    g.add_argument("--noise", type=float, default=0.0, help="Gaussian noise sigma")
    g.add_argument("--holes", type=int, default=1, choices=HOLE_COUNTS)
    g.add_argument("--neck", type=float, default=None, help="dog-bone neck half-width")
    g.add_argument("--transform", choices=TRANSFORM_KINDS, default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    b = sub.add_parser("barcode", help="compute an ellipsoid or Rips barcode")
    b.add_argument("input")
    _add_complex_flags(b)
    b.add_argument("--dump-complex", default=None, help="also write the filtered complex here")
    b.add_argument("--out", required=True)

    r = sub.add_parser("render", help="draw a barcode TSV as SVG")
    r.add_argument("input")
    r.add_argument("--rmax", type=float, default=None)
    r.add_argument("--out", required=True)

    c = sub.add_parser("check-nesting", help="verify D/2 <= edge value <= q D/2 on every pair")
    c.add_argument("input")
    _add_complex_flags(c, kind_flag=False)
    c.add_argument("--tol", type=float, default=1e-6)

    k = sub.add_parser("classify", help="leave-one-out 1-NN on top-k lifespan signatures")
    src = k.add_mutually_exclusive_group()
    src.add_argument("--dataset", default=None,
                     help="directory of point-cloud files, one subdirectory per class")
    src.add_argument("--holes-classes", type=_int_list, default=[0, 1, 2],
                     help="hole counts to generate, e.g. 0,1,2")
    k.add_argument("--clouds-per-class", type=int, default=5)
    k.add_argument("--n", type=int, default=100)
    k.add_argument("--runs", type=int, default=1, help="independent seeds to average over")
    k.add_argument("--pipeline", choices=("phe", "phr", "both"), default="both")
    k.add_argument("--transform", choices=TRANSFORM_KINDS, default=None)
    k.add_argument("--degrees", type=_int_list, default=[0, 1])
    k.add_argument("--top-k", type=int, default=10)
    k.add_argument("--signatures-out", default=None, help="CSV of signatures (label first)")
    _add_complex_flags(k, kind_flag=False)
    return parser


def cmd_generate(args, argv) -> int:
    n = args.n
    if args.shape == "circle":
        cloud = generate_circle(n, args.radius, args.noise, args.seed)
    elif args.shape == "figure-eight":
        cloud = generate_figure_eight(n, args.scale, args.noise, args.seed)
    elif args.shape == "dogbone":
        kw = {} if args.neck is None else {"neck": args.neck}
        cloud = generate_dog_bone(n, args.seed, **kw)
    else:
        cloud = generate_disk_with_holes(n, args.holes, args.seed)
    if args.transform:
        cloud = apply_transformation(cloud, TransformSpec(args.transform, seed=args.seed))
    save_point_cloud(cloud, args.out, header=_provenance(argv))
    return EXIT_OK


def _complex_header(args, est, cx, cloud) -> list:
    meta = cx.meta
    lines = [f"kind={meta.get('kind')}"]
    if meta.get("kind") == "ellipsoid":
        lines.append(f"k={est.k}")
        lines.append("ratios=" + ",".join(format(r, ".12g") for r in meta.get("ratios", [])))
    lines += [f"rmax={meta['rmax']!r}", f"dmax={cx.dmax}", f"n_points={cloud.n}", f"dim={cloud.d}",
              "field=GF(2)", "convention=radius"]
    return lines


def cmd_barcode(args, argv) -> int:
    cloud = load_point_cloud(args.input)
    est = _estimator(args)
    cx = est.complex(cloud)
    bc = compute_persistence(cx, args.max_degree)
    header = _provenance(argv) + _complex_header(args, est, cx, cloud)
    bc.to_tsv(args.out, header=header)
    if args.dump_complex:
        cx.dump(args.dump_complex, header=header)
    log.info("%d intervals written to %s", len(bc), args.out)
    return EXIT_OK


def cmd_render(args, argv) -> int:
    bc = Barcode.from_tsv(args.input)
    svg = render_barcode_svg(bc, rmax=args.rmax, title=Path(args.input).name)
    Path(args.out).write_text(svg, encoding="utf-8")
    return EXIT_OK


def cmd_check_nesting(args, argv, edges_hook=None) -> int:
    cloud = load_point_cloud(args.input)
    ratios = RatioSpec(ratios=tuple(args.ratios)) if args.ratios else RatioSpec(q=args.q, intrinsic_dim=args.intrinsic_dim)
    k = min(args.k, cloud.n - 1) if cloud.n > 1 else args.k
    ellipsoids = construct_ellipsoids(cloud, k, ratios)
    cfg = SolverConfig(lambda_tol=args.tol_lambda, radius_rel_tol=args.tol_radius)
    rmax = args.rmax if args.rmax is not None else float("inf")
    edges = build_ellipsoid_edges(cloud, ellipsoids, rmax, cfg, n_jobs=args.threads)
    if edges_hook is not None:
        edges = edges_hook(edges)
    bad = nesting_violations(cloud, ellipsoids, edges, args.tol)
    print(f"checked {len(edges)} edges, q={ratios.max_elongation:g}, tol={args.tol:g}")
    for i, j, val, lo, hi in bad:
        print(f"VIOLATION pair ({i}, {j}): value {val:.12g} outside [{lo:.12g}, {hi:.12g}]")
    print("PASS" if not bad else f"FAIL: {len(bad)} violation(s)")
    return EXIT_OK if not bad else EXIT_CHECK


def _load_dataset(path) -> tuple:
    root = Path(path)
    if not root.is_dir():
        raise UsageError(f"dataset {path} is not a directory")
    classes = sorted(p for p in root.iterdir() if p.is_dir())
    clouds, labels = [], []
    for label, cdir in enumerate(classes):
        for f in sorted(cdir.iterdir()):
            if f.is_file() and not f.name.startswith("."):
                clouds.append(load_point_cloud(f))
                labels.append(label)
    return clouds, labels, [c.name for c in classes]


def _generated_dataset(args, run: int) -> tuple:
    clouds, labels = [], []
    for h in args.holes_classes:
        if h not in HOLE_COUNTS:
            raise UsageError(f"hole count must be one of {HOLE_COUNTS}, got {h}")
        for i in range(args.clouds_per_class):
            seed = args.seed + 1_000_000 * run + 1000 * h + i
            cloud = generate_disk_with_holes(args.n, h, seed)
            if args.transform:
                cloud = apply_transformation(cloud, TransformSpec(args.transform, seed=seed))
            clouds.append(cloud)
            labels.append(h)
    return clouds, labels, [str(h) for h in args.holes_classes]


def pipeline_signatures(clouds, estimator, degrees, top_k) -> list:
    out = []
    for cloud in clouds:
        bc = estimator.barcode(cloud)
        out.append(top_lifespans(bc, degrees, top_k, bc.rmax))
    return out


def cmd_classify(args, argv) -> int:
    pipelines = ("phe", "phr") if args.pipeline == "both" else (args.pipeline,)
    if args.dataset is None and len(set(args.holes_classes)) < 2:
        raise UsageError("classification needs at least two classes")
    runs = 1 if args.dataset else args.runs
    scores = {p: [] for p in pipelines}
    sig_rows = []
    for run in range(runs):
        if args.dataset:
            clouds, labels, names = _load_dataset(args.dataset)
        else:
            clouds, labels, names = _generated_dataset(args, run)
        if len(set(labels)) < 2:
            raise UsageError("classification needs at least two classes")
        for p in pipelines:
            est = _estimator(args, "ellipsoid" if p == "phe" else "rips")
            sigs = pipeline_signatures(clouds, est, args.degrees, args.top_k)
            acc, pred = loo_nn_classify(sigs, labels, return_predictions=True)
            scores[p].append(acc)
            print(f"run {run} {p}: accuracy {acc:.4f}")
            for (t, q), cnt in confusion_counts(labels, pred).items():
                print(f"  {p} true={t} predicted={q}: {cnt}")
            sig_rows += [(p, run, lab, s.values) for lab, s in zip(labels, sigs)]
    for p in pipelines:
        print(f"{p} mean accuracy {np.mean(scores[p]):.4f} over {runs} run(s)")
    if len(pipelines) == 2:
        print(f"phe - phr: {np.mean(scores['phe']) - np.mean(scores['phr']):+.4f}")
    if args.signatures_out:
        with open(args.signatures_out, "w", encoding="utf-8", newline="\n") as fh:
            for line in _provenance(argv):
                fh.write(f"# {line}\n")
            fh.write("# columns: label, then top-k lifespans per degree " + ",".join(map(str, args.degrees)) + "\n")
            block = None
            for p, run, lab, vals in sig_rows:
                if (p, run) != block:
                    block = (p, run)
                    fh.write(f"# pipeline={p} run={run}\n")
                fh.write(",".join([str(lab)] + [format(v, ".12g") for v in vals]) + "\n")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "barcode": cmd_barcode,
    "render": cmd_render,
    "check-nesting": cmd_check_nesting,
    "classify": cmd_classify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args, argv)
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except InvalidArgument as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EllipsoidPHError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
