"""Command line experiment harness.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant
violation.
"""

import argparse
import json
import os
import sys

import numpy as np

from .clustering import ClusterModel
from .corpus_tools import (
    apply_rules,
    generate_synthetic,
    load_corpus,
    load_labels,
    load_rules,
    parse_trace_file,
    preprocess,
    save_corpus,
    save_labels,
)
from .errors import DataError, ProtoabsError
from .evaluation import evaluate
from .experiments import (
    run_experiment,
    sweep_csv,
    sweep_k,
    sweep_labels,
    write_atomic,
)
from .model import UNLABELED
from .plots import svg_heatmap, svg_lineplot
from .tls_default import default_rules, default_synth_spec


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print("error: %s" % message, file=sys.stderr)
        raise SystemExit(1)


def _int_list(text):
    return [int(x) for x in text.split(",") if x != ""]


def _k_range(text):
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return _int_list(text)


def build_parser():
    parser = _Parser(prog="protoabs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate the synthetic labeled corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--noise-rate", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--arity", type=int, default=32)

    p = sub.add_parser("ingest", help="parse a decoded trace file into a corpus")
    p.add_argument("trace_file")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--arity", type=int, default=32)
    p.add_argument("--drop-keys", default="RANDOM,SESSIONID")
    p.add_argument("--sample-n", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("label", help="apply abstraction rules to a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--rules", default=None, help="rule file (default: bundled TLS rules)")
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("cluster", help="run one clustering experiment")
    p.add_argument("--corpus", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--algorithm", choices=["kmeans", "mpck"], default="mpck")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--labels-per-class", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--w", type=float, default=1.0)
    p.add_argument("--w-bar", type=float, default=1.0)
    p.add_argument("--mode", choices=["balanced", "unbalanced"], default="balanced")
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("eval", help="evaluate a stored model against labels")
    p.add_argument("--model", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("sweep-k", help="sweep the cluster count K")
    p.add_argument("--corpus", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--k", type=_k_range, default="20..40",
                   help="range lo..hi or comma list")
    p.add_argument("--labels-per-class", type=int, default=1)
    p.add_argument("--seed", type=_int_list, default="0", help="comma-separated seeds")
    p.add_argument("--w", type=float, default=1.0)
    p.add_argument("--w-bar", type=float, default=1.0)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("sweep-labels", help="sweep labels per class")
    p.add_argument("--corpus", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--counts", type=_int_list, default="1,2,3,4,5")
    p.add_argument("--mode", choices=["balanced", "unbalanced"], default="balanced")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--seed", type=_int_list, default="0", help="comma-separated seeds")
    p.add_argument("--w", type=float, default=1.0)
    p.add_argument("--w-bar", type=float, default=1.0)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out-dir", required=True)

    return parser


def _ensure_dir(path):
    os.makedirs(path, exist_ok=True)


def _summary(corpus, labels=None):
    line = "N=%d F=%d" % (len(corpus), corpus.arity)
    if labels is not None:
        hist = np.bincount(
            [l for l in labels.labels if l != UNLABELED], minlength=labels.n_classes
        )
        line += " J=%d class_histogram=%s" % (labels.n_classes, hist.tolist())
    return line


def cmd_synth(args):
    spec = default_synth_spec(
        n_messages=args.n, noise_rate=args.noise_rate, seed=args.seed, arity=args.arity
    )
    corpus, labels = generate_synthetic(spec)
    _ensure_dir(args.out_dir)
    save_corpus(corpus, os.path.join(args.out_dir, "corpus.json"))
    save_labels(labels, os.path.join(args.out_dir, "labels.json"))
    print(_summary(corpus, labels))
    return 0


def cmd_ingest(args):
    traces = parse_trace_file(args.trace_file)
    drop = frozenset(k for k in args.drop_keys.split(",") if k)
    corpus = preprocess(
        traces, arity=args.arity, drop_keys=drop, sample_n=args.sample_n, seed=args.seed
    )
    _ensure_dir(args.out_dir)
    save_corpus(corpus, os.path.join(args.out_dir, "corpus.json"))
    print(_summary(corpus))
    return 0


def cmd_label(args):
    corpus = load_corpus(args.corpus)
    rules = load_rules(args.rules) if args.rules else default_rules()
    labels = apply_rules(corpus, rules)
    _ensure_dir(args.out_dir)
    save_labels(labels, os.path.join(args.out_dir, "labels.json"))
    print(_summary(corpus, labels))
    return 0


def _emit_report(out_dir, result):
    report = result.report
    write_atomic(os.path.join(out_dir, "eval.json"), report.to_json() + "\n")
    write_atomic(os.path.join(out_dir, "confusion.csv"), report.confusion_csv())
    heatmap = svg_heatmap(
        report.confusion.counts,
        ["w%d" % k for k in report.confusion.row_ids],
        ["c%d" % j for j in report.confusion.col_ids],
        title="%s K=%d purity=%.4f ARI=%.4f"
        % (result.algorithm, result.k, report.purity, report.ari),
    )
    write_atomic(os.path.join(out_dir, "confusion.svg"), heatmap)


def cmd_cluster(args):
    corpus = load_corpus(args.corpus)
    labels = load_labels(args.labels)
    result = run_experiment(
        corpus,
        labels,
        algorithm=args.algorithm,
        k=args.k,
        labels_per_class=args.labels_per_class,
        seed=args.seed,
        w=args.w,
        w_bar=args.w_bar,
        max_iterations=args.max_iters,
        tol=args.tol,
        mode=args.mode,
    )
    _ensure_dir(args.out_dir)
    write_atomic(
        os.path.join(args.out_dir, "model.json"), result.model.to_json() + "\n"
    )
    _emit_report(args.out_dir, result)
    print(
        "%s k=%d seed=%d purity=%.6f ari=%.6f objective=%.6f iters=%d "
        "must=%d cannot=%d duration=%.2fs"
        % (
            result.algorithm, result.k, result.seed, result.report.purity,
            result.report.ari, result.model.objective, result.model.iterations,
            result.n_must, result.n_cannot, result.duration,
        )
    )
    return 0


def cmd_eval(args):
    with open(args.model, "r", encoding="utf-8") as fh:
        model = ClusterModel.from_dict(json.load(fh))
    labels = load_labels(args.labels)
    report = evaluate(model.assignments, labels)
    _ensure_dir(args.out_dir)
    write_atomic(os.path.join(args.out_dir, "eval.json"), report.to_json() + "\n")
    write_atomic(os.path.join(args.out_dir, "confusion.csv"), report.confusion_csv())
    print("purity=%.6f ari=%.6f n=%d" % (report.purity, report.ari, report.n))
    return 0


def cmd_sweep_k(args):
    corpus = load_corpus(args.corpus)
    labels = load_labels(args.labels)
    k_values = args.k if isinstance(args.k, list) else _k_range(args.k)
    seeds = args.seed if isinstance(args.seed, list) else _int_list(args.seed)
    rows, means, best_k = sweep_k(
        corpus, labels, k_values, seeds,
        labels_per_class=args.labels_per_class,
        w=args.w, w_bar=args.w_bar, max_iterations=args.max_iters, tol=args.tol,
    )
    _ensure_dir(args.out_dir)
    write_atomic(os.path.join(args.out_dir, "sweep_k.csv"), sweep_csv(rows, means, "k"))
    plot = svg_lineplot(
        k_values,
        {
            "purity": [means[k][0] for k in k_values],
            "ari": [means[k][1] for k in k_values],
        },
        title="K sweep (labels/class=%d)" % args.labels_per_class,
        x_label="K",
    )
    write_atomic(os.path.join(args.out_dir, "sweep_k.svg"), plot)
    print("best_k=%d ari=%.6f" % (best_k, means[best_k][1]))
    return 0


def cmd_sweep_labels(args):
    corpus = load_corpus(args.corpus)
    labels = load_labels(args.labels)
    counts = args.counts if isinstance(args.counts, list) else _int_list(args.counts)
    seeds = args.seed if isinstance(args.seed, list) else _int_list(args.seed)
    rows, means = sweep_labels(
        corpus, labels, counts, seeds, mode=args.mode, k=args.k,
        w=args.w, w_bar=args.w_bar, max_iterations=args.max_iters, tol=args.tol,
    )
    _ensure_dir(args.out_dir)
    write_atomic(
        os.path.join(args.out_dir, "sweep_labels.csv"),
        sweep_csv(rows, means, "labels_per_class"),
    )
    plot = svg_lineplot(
        counts,
        {
            "purity": [means[c][0] for c in counts],
            "ari": [means[c][1] for c in counts],
        },
        title="labels-per-class sweep (%s)" % args.mode,
        x_label="labels per class",
    )
    write_atomic(os.path.join(args.out_dir, "sweep_labels.svg"), plot)
    for c in counts:
        print("labels_per_class=%d mean_purity=%.6f mean_ari=%.6f"
              % (c, means[c][0], means[c][1]))
    return 0


_COMMANDS = {
    "synth": cmd_synth,
    "ingest": cmd_ingest,
    "label": cmd_label,
    "cluster": cmd_cluster,
    "eval": cmd_eval,
    "sweep-k": cmd_sweep_k,
    "sweep-labels": cmd_sweep_labels,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if e.code is not None else 1
    try:
        return _COMMANDS[args.command](args)
    except DataError as e:
        print("data error: %s" % e, file=sys.stderr)
        return 2
    except OSError as e:
        print("data error: %s" % e, file=sys.stderr)
        return 2
    except ProtoabsError as e:
        print("internal error: %s" % e, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
