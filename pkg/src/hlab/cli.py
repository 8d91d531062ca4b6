"""Command-line interface.

Subcommands: synth, hardness, order, filter, cluster-cod, train-curriculum,
boost, compare, report, run.  All randomness flows from --seed flags; the
profile cache location honors the HLAB_CACHE_DIR environment variable.
"""

from __future__ import annotations

import argparse
import configparser
import sys

import numpy as np

from . import __version__
from .config import load_config, parse_learner_entries, parse_trigger
from .curriculum import Schedule, curriculum_train_dt, curriculum_train_mlp, write_stage_log
from .cv import make_cv_plan
from .data import flips_sidecar_path, load_table, save_flips, save_table, synth_gaussians
from .ensemble import FilterSpec, adaboost, filter_by_ih, multiboost
from .errors import HlabError
from .hardness import (
    compute_profile,
    hardness_ordering,
    load_profile,
    save_profile,
)
from .harness import failed_records, load_records, run_experiment
from .learners import LearnerSpec, default_learner_set
from .metalearn import cluster, cod_matrix, cut, representatives, to_newick
from .report import make_report
from .stats import PairedResults, win_tie_loss, wilcoxon_signed_rank

_BASES = {
    "mlp": lambda: LearnerSpec("mlp", "mlp"),
    "c45": lambda: LearnerSpec("c45-tree", "c45"),
}


def _learner_set_from(args):
    if getattr(args, "config", None):
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        parser.optionxform = str
        if not parser.read(args.config):
            raise HlabError(f"config file {args.config!r} not found")
        if parser.has_section("hardness"):
            specs = parse_learner_entries(parser.items("hardness"))
            if specs:
                return specs
    return default_learner_set()


def _load_dataset(args):
    return load_table(args.data, format=args.format, class_col=args.class_col)


def _add_dataset_args(p):
    p.add_argument("--data", required=True, help="dataset file (csv or arff)")
    p.add_argument("--class-col", default=None, help="label column (default: last)")
    p.add_argument("--format", default=None, choices=["csv", "annotated"])


def cmd_synth(args):
    ds = synth_gaussians(
        n_per_class=args.n_per_class,
        dims=args.dims,
        separation=args.separation,
        noise_rate=args.noise,
        seed=args.seed,
        name=args.name,
    )
    save_table(ds, args.out)
    sidecar = flips_sidecar_path(args.out)
    save_flips(ds, sidecar)
    print(
        f"wrote {ds.n_instances} instances to {args.out} "
        f"({len(ds.meta['flipped_ids'])} flipped labels; list in {sidecar})"
    )
    return 0


def cmd_hardness(args):
    ds = _load_dataset(args)
    learners = _learner_set_from(args)
    plan = make_cv_plan(ds, args.repeats, args.folds, args.seed)
    profile = compute_profile(ds, learners, plan)
    save_profile(profile, args.out)
    print(
        f"computed hardness for {ds.n_instances} instances with "
        f"{len(learners)} learners x {args.repeats} repeats "
        f"({profile.matrix.n_trials} trials each)"
    )
    print(f"mean ih = {profile.ih.mean():.4f}; profile saved to {args.out}")
    return 0


def cmd_order(args):
    expected_dataset = None
    if args.data:
        expected_dataset = _load_dataset(args).content_hash()
    profile = load_profile(
        args.profile, expected_dataset=expected_dataset, force=args.force
    )
    order = hardness_ordering(profile)
    pos = {int(i): k for k, i in enumerate(profile.ids)}
    print("instance_id\tih")
    for instance_id in order:
        print(f"{int(instance_id)}\t{profile.ih[pos[int(instance_id)]]:.6g}")
    return 0


def cmd_filter(args):
    ds = _load_dataset(args)
    profile = load_profile(
        args.profile, expected_dataset=ds.content_hash(), force=args.force
    )
    filtered = filter_by_ih(ds, profile, FilterSpec(args.tau))
    save_table(filtered, args.out)
    removed = ds.n_instances - filtered.n_instances
    print(
        f"kept {filtered.n_instances} of {ds.n_instances} instances "
        f"(removed {removed} with ih >= {args.tau}); wrote {args.out}"
    )
    return 0


def cmd_cluster_cod(args):
    ds = _load_dataset(args)
    learners = _learner_set_from(args)
    plan = make_cv_plan(ds, args.repeats, args.folds, args.seed)
    codm = cod_matrix(ds, learners, plan)
    dend = cluster(codm, linkage=args.linkage)
    print("newick:", to_newick(dend))
    clusters = cut(dend, args.cut)
    reps = representatives(clusters, codm)
    for group, rep in zip(clusters, reps):
        print(f"cluster {{{', '.join(sorted(group))}}} -> representative {rep}")
    return 0


def cmd_train_curriculum(args):
    ds = _load_dataset(args)
    profile = load_profile(
        args.profile, expected_dataset=ds.content_hash(), force=args.force
    )
    trigger, n = parse_trigger(args.trigger)
    sched = Schedule(
        initial_ih=args.initial_ih, step=args.step, trigger=trigger, n=max(n, 1)
    )
    base = _BASES[args.base]()
    if args.base == "mlp":
        result = curriculum_train_mlp(ds, profile, sched, base, seed=args.seed)
    else:
        result = curriculum_train_dt(
            ds, profile, sched, base, prune_between=args.prune, seed=args.seed
        )
    print(f"trained over {len(result.log)} stages; final model on {ds.n_instances} instances")
    for rec in result.log:
        print(f"  stage {rec.stage}: tau={rec.threshold:g} active={rec.active} {rec.action}")
    print(f"resubstitution accuracy: {result.model.accuracy(ds):.4f}")
    if args.stage_log:
        write_stage_log(result.log, args.stage_log)
        print(f"stage log written to {args.stage_log}")
    return 0


def cmd_boost(args):
    ds = _load_dataset(args)
    base = _BASES[args.base]()
    work = ds
    if args.filter_tau is not None:
        if not args.profile:
            raise HlabError("--filter-tau requires --profile")
        profile = load_profile(
            args.profile, expected_dataset=ds.content_hash(), force=args.force
        )
        work = filter_by_ih(ds, profile, FilterSpec(args.filter_tau))
    algo = adaboost if args.algo == "adaboost" else multiboost
    ens = algo(base, work, m=args.iters, seed=args.seed)
    alphas = [a for _, a in ens.members]
    print(
        f"{args.algo}: {ens.iterations_completed} members from "
        f"{ens.iterations_requested} rounds; alphas "
        f"[{', '.join(f'{a:.3f}' for a in alphas)}]"
    )
    print(f"training-set accuracy (unfiltered): {ens.accuracy(ds):.4f}")
    return 0


def _scoped_records(args):
    """Records restricted to one experiment config.

    A records log may hold appends from several configs (reruns after
    edits); by default only the most recent config's rows count.
    """
    records = load_records(args.records)
    if not records:
        raise HlabError(f"no records in {args.records!r}")
    if getattr(args, "all_configs", False):
        return records
    wanted = args.config_hash or records[-1].config_hash
    return [r for r in records if r.config_hash == wanted]


def cmd_compare(args):
    records = [r for r in _scoped_records(args) if r.error is None]
    by_ds = {}
    for rec in records:
        by_ds.setdefault(rec.dataset, {})[rec.method] = rec.mean_accuracy
    pairs = []
    for ds_name in sorted(by_ds):
        cell = by_ds[ds_name]
        if args.method_a in cell and args.method_b in cell:
            pairs.append([cell[args.method_a], cell[args.method_b]])
    if not pairs:
        raise HlabError(
            f"no datasets cover both {args.method_a!r} and {args.method_b!r}"
        )
    pr = PairedResults((args.method_a, args.method_b), np.array(pairs))
    test = wilcoxon_signed_rank(pr, alternative=args.alternative)
    g, e, l = win_tie_loss(pr, args.epsilon)
    print(f"{args.method_a} vs {args.method_b} over {len(pairs)} datasets")
    print(
        f"wilcoxon signed-rank: p={test.p_value:.6g} W={test.statistic:g} "
        f"n_eff={test.n_effective} ({test.method}, {test.direction})"
    )
    print(f">-=-<: {g}-{e}-{l}")
    return 0


def cmd_report(args):
    records = _scoped_records(args)
    methods = args.methods.split(",") if args.methods else None
    paths = make_report(
        records, args.out_dir, methods=methods, alternative=args.alternative,
        epsilon=args.epsilon,
    )
    for name, path in sorted(paths.items()):
        print(f"wrote {path}")
    return 0


def cmd_run(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.master_seed = args.seed
    out_dir = args.out_dir or cfg.output_dir
    if not out_dir:
        raise HlabError("provide --out-dir or [output] dir in the config")
    records = run_experiment(
        cfg, out_dir=out_dir, workers=args.workers, cache_dir=args.cache_dir,
        log=print if not args.quiet else None,
    )
    failures = failed_records(records)
    failed_methods = {r.method for r in failures}
    covered = [m.name for m in cfg.methods if m.name not in failed_methods]
    if covered:
        make_report(records, out_dir, methods=covered)
        print(
            f"{len(records) - len(failures)} of {len(records)} cells succeeded; "
            f"reports in {out_dir}"
        )
    else:
        print(f"all {len(records)} cells failed; no report generated")
    for rec in failures:
        print(f"  FAILED {rec.dataset}/{rec.method}: {rec.error}")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hlab",
        description="Instance-hardness toolkit: orderings, curricula, "
        "filtering, boosting and comparison statistics.",
    )
    parser.add_argument("--version", action="version", version=f"hlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic two-Gaussian dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--n-per-class", type=int, default=100)
    p.add_argument("--dims", type=int, default=2)
    p.add_argument("--separation", type=float, default=3.0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", default="synth")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("hardness", help="compute and cache an instance-hardness profile")
    _add_dataset_args(p)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="profile TSV to write")
    p.add_argument("--config", default=None, help="INI with a [hardness] learner set")
    p.set_defaults(func=cmd_hardness)

    p = sub.add_parser("order", help="print instances by ascending hardness")
    p.add_argument("--profile", required=True)
    p.add_argument("--data", default=None, help="verify the profile against this dataset")
    p.add_argument("--class-col", default=None)
    p.add_argument("--format", default=None, choices=["csv", "annotated"])
    p.add_argument("--force", action="store_true", help="downgrade provenance mismatch to a warning")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("filter", help="remove instances with ih >= tau")
    _add_dataset_args(p)
    p.add_argument("--profile", required=True)
    p.add_argument("--tau", type=float, default=0.75)
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("cluster-cod", help="cluster learners by output difference")
    _add_dataset_args(p)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--linkage", default="average", choices=["average", "single", "complete"])
    p.add_argument("--cut", type=float, default=0.18)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_cluster_cod)

    p = sub.add_parser("train-curriculum", help="train with a hardness curriculum")
    _add_dataset_args(p)
    p.add_argument("--profile", required=True)
    p.add_argument("--base", default="mlp", choices=sorted(_BASES))
    p.add_argument("--trigger", default="epochs:100", help="epochs:<n> or convergence")
    p.add_argument("--initial-ih", type=float, default=0.0)
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--prune", action=argparse.BooleanOptionalAction, default=True,
                   help="prune the tree before each expansion (c45 base)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stage-log", default=None, help="write the stage log TSV here")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_train_curriculum)

    p = sub.add_parser("boost", help="train AdaBoost or MultiBoost")
    _add_dataset_args(p)
    p.add_argument("--algo", default="adaboost", choices=["adaboost", "multiboost"])
    p.add_argument("--base", default="c45", choices=sorted(_BASES))
    p.add_argument("--iters", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--filter-tau", type=float, default=None)
    p.add_argument("--profile", default=None)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_boost)

    p = sub.add_parser("compare", help="paired comparison of two methods from records")
    p.add_argument("--records", required=True)
    p.add_argument("--method-a", required=True)
    p.add_argument("--method-b", required=True)
    p.add_argument("--alternative", default="greater", choices=["greater", "two-sided"])
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--config-hash", default=None,
                   help="restrict to this config (default: latest in the file)")
    p.add_argument("--all-configs", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("report", help="render comparison tables from records")
    p.add_argument("--records", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--methods", default=None, help="comma-separated column order")
    p.add_argument("--alternative", default="greater", choices=["greater", "two-sided"])
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--config-hash", default=None,
                   help="restrict to this config (default: latest in the file)")
    p.add_argument("--all-configs", action="store_true")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("run", help="run a configured experiment grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_run)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
