"""Command-line experiment driver.

Each subcommand parses one JSON config, dispatches to the library, and
persists CSV/JSON results plus a run manifest into --out.  CSV bodies are
byte-identical across reruns with the same config and seed; only manifest
timestamps move.
"""
from __future__ import annotations

import argparse
import csv
import datetime
import hashlib
import io
import json
import os
import sys
from pathlib import Path

from . import __version__
from .errors import McaLabError, SpecError
from .groups import (FiniteGroup, abelian_invariants, center,
                     commutator_subgroup, is_nilpotent, upper_central_series)
from .rules import permutativity
from .measures import MeasureSpec, trajectory_partition_entropy
from .decompose import decompose_mca, nilpotent_tower
from .spectral import (LinearRuleDual, cesaro_randomization, diffusion_report,
                       dual_action)
from .specs import (ExperimentConfig, load_experiment, parse_character,
                    parse_measure, parse_probe)

STATE_CAP_DEFAULT = 10**7


# ---------------------------------------------------------------------------
# serialization helpers

def _fmt(x) -> str:
    """Deterministic scalar formatting for CSV cells."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _subgroup_labels(G: FiniteGroup, members) -> list[str]:
    return [G.labels[m] for m in sorted(members)]


def _rule_json(rule) -> dict:
    return {
        "neighborhood": [rule.v_lo, rule.v_hi],
        "bias": rule.group.labels[rule.bias],
        "factors": [{"pos": p, "coeff": {"images": list(map(int, c.image_of))}}
                    for p, c in rule.factors],
    }


def _write_csv(path: Path, header: list[str], rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    path.write_text(buf.getvalue())


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


class Run:
    """Collects outputs and verification statuses, then writes the manifest."""

    def __init__(self, args, command: str):
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.command = command
        self.config_path = Path(args.config)
        self.started = datetime.datetime.now(datetime.timezone.utc)
        self.outputs: list[str] = []
        self.verification: dict[str, bool] = {}
        self.extra: dict = {}

    def add(self, name: str) -> Path:
        self.outputs.append(name)
        return self.out / name

    def verify(self, name: str, ok: bool) -> None:
        self.verification[name] = bool(ok)

    @property
    def ok(self) -> bool:
        return all(self.verification.values())

    def finish(self, args) -> int:
        digest = hashlib.sha256(self.config_path.read_bytes()).hexdigest()
        manifest = {
            "command": self.command,
            "config": str(self.config_path),
            "config_sha256": digest,
            "tool_version": __version__,
            "started_at": self.started.isoformat(),
            "finished_at": datetime.datetime.now(
                datetime.timezone.utc).isoformat(),
            "cap_states": args.cap_states,
            "seed": args.seed,
            "workers": args.workers,
            "outputs": self.outputs,
            "verification": self.verification,
            **self.extra,
        }
        for name in self.outputs:
            p = self.out / name
            if not p.exists() or p.stat().st_size == 0:
                raise McaLabError(f"output {name} missing or empty")
        _write_json(self.out / "manifest.json", manifest)
        return 0 if self.ok else 1


# ---------------------------------------------------------------------------
# subcommands

def cmd_group(cfg: ExperimentConfig, run: Run, args) -> None:
    G = cfg.group
    series = upper_central_series(G)
    report = {
        "order": G.order,
        "labels": list(G.labels),
        "center": _subgroup_labels(G, center(G).members),
        "commutator_subgroup": _subgroup_labels(
            G, commutator_subgroup(G).members),
        "upper_central_series": [_subgroup_labels(G, sg.members)
                                 for sg in series.chain],
        "nilpotent": is_nilpotent(G),
        "series_factor_invariants": [list(t)
                                     for t in series.factor_invariants],
        "abelian_invariants": (list(abelian_invariants(G).orders)
                               if G.is_abelian else None),
    }
    _write_json(run.add("group_report.json"), report)
    run.verify("group_constructed", True)
    print(f"order {G.order}; center {report['center']}; "
          f"nilpotent: {report['nilpotent']}")


def _fibre_flag_rows(dec):
    """(c-word labels..., left, right) per fibre, lexicographic order."""
    C = dec.h_rule.group
    rows = []
    for word, rule_c in sorted(dec.fibre_table().items()):
        flags = permutativity(rule_c)
        rows.append([" ".join(C.labels[c] for c in word),
                     flags.left, flags.right])
    return rows


def cmd_decompose(cfg: ExperimentConfig, run: Run, args) -> None:
    if cfg.rule is None:
        raise SpecError("config: decompose needs a rule")
    if cfg.use_tower:
        tower = nilpotent_tower(cfg.rule, cap=args.cap_states)
        report = {
            "depth": tower.depth,
            "complete": tower.is_complete,
            "factor_invariants": [list(t) for t in tower.factor_invariants],
            "residue_order": (tower.residue_group.order
                              if tower.residue_group else None),
            "levels": [{
                "subgroup": _subgroup_labels(lvl.frame.B,
                                             lvl.frame.A.members),
                "quotient_rule": _rule_json(lvl.decomposition.h_rule),
                "verified": bool(lvl.decomposition.verified),
            } for lvl in tower.levels],
        }
        _write_json(run.add("tower_report.json"), report)
        ok = tower.is_complete and all(
            lvl.decomposition.verified for lvl in tower.levels)
        run.verify("tower_verified", ok)
        print(f"tower depth {tower.depth}; complete: {tower.is_complete}")
        return
    if cfg.frame is None:
        raise SpecError("config: decompose needs a frame (or tower: true)")
    dec = decompose_mca(cfg.rule, cfg.frame, cap=args.cap_states)
    A = cfg.frame.a_group
    fibres = []
    for word, rule_a in sorted(dec.fibre_table().items()):
        fibres.append({
            "c_word": [dec.h_rule.group.labels[c] for c in word],
            "bias": A.labels[rule_a.bias],
            "coeffs": [{"pos": p, "images": list(map(int, m.image_of))}
                       for p, m in rule_a.factors],
        })
    report = {
        "quotient_rule": _rule_json(dec.h_rule),
        "fibres": fibres,
        "error_map": {" ".join(map(str, w)): int(e)
                      for w, e in sorted(dec.error_map.items())},
        "verified": bool(dec.verified),
    }
    _write_json(run.add("decomposition_report.json"), report)
    _write_csv(run.add("fibre_flags.csv"),
               ["c_word", "left_permutative", "right_permutative"],
               _fibre_flag_rows(dec))
    run.verify("recompose_check", bool(dec.verified))
    print(f"decomposition over |A|={A.order}, |C|={dec.h_rule.group.order}; "
          f"verified: {bool(dec.verified)}")


def cmd_permute(cfg: ExperimentConfig, run: Run, args) -> None:
    if cfg.rule is None:
        raise SpecError("config: permute needs a rule")
    flags = permutativity(cfg.rule)
    rows = [["-", flags.left, flags.right]]
    if cfg.frame is not None:
        dec = decompose_mca(cfg.rule, cfg.frame, cap=args.cap_states)
        run.verify("recompose_check", bool(dec.verified))
        rows.extend(_fibre_flag_rows(dec))
    _write_csv(run.add("permute.csv"),
               ["c_word", "left_permutative", "right_permutative"], rows)
    run.verify("permutativity_computed", True)
    print(f"rule left: {flags.left}, right: {flags.right}; "
          f"{len(rows) - 1} fibre rows")


def cmd_entropy(cfg: ExperimentConfig, run: Run, args) -> None:
    if cfg.rule is None:
        raise SpecError("config: entropy needs a rule")
    spec = parse_measure(cfg.group.order,
                         cfg.param("measure") or {"kind": "uniform"},
                         "measure")
    n_max = cfg.param("n_max")
    if not isinstance(n_max, int) or n_max < 1:
        raise SpecError("config.n_max: need a positive integer")
    marginal = trajectory_partition_entropy(cfg.rule, spec, 1,
                                            cap=args.cap_states)
    rows = []
    for n in range(1, n_max + 1):
        joint = marginal if n == 1 else trajectory_partition_entropy(
            cfg.rule, spec, n, cap=args.cap_states)
        rows.append([n, joint, marginal, joint / n])
    _write_csv(run.add("entropy.csv"),
               ["N", "joint_entropy_bits", "marginal_entropy_bits",
                "per_step_rate"], rows)
    run.verify("entropy_computed", True)
    print(f"per-step rate at N={n_max}: {rows[-1][3]:.6f} bits")


def cmd_diffuse(cfg: ExperimentConfig, run: Run, args) -> None:
    if cfg.rule is None:
        raise SpecError("config: diffuse needs a rule")
    alpha_spec = cfg.param("alpha")
    if alpha_spec is None:
        raise SpecError("config.alpha: diffuse needs a seed character")
    chi = parse_character(cfg.group, alpha_spec, "alpha")
    j_max = cfg.param("j_max")
    if not isinstance(j_max, int) or j_max < 1:
        raise SpecError("config.j_max: need a positive integer")
    thresholds = tuple(cfg.param("thresholds", [2, 4, 10]))
    dual = LinearRuleDual.from_rule(cfg.rule)
    rep = diffusion_report(dual, chi, j_max, thresholds=thresholds)
    _write_csv(run.add("diffuse.csv"), ["j", "rank"],
               list(enumerate(rep.ranks)))
    _write_json(run.add("diffuse_report.json"), {
        "j_max": j_max,
        "thresholds": list(rep.thresholds),
        "densities": {str(t): rep.densities[t] for t in rep.thresholds},
        "density_trail": {str(t): rep.density_trail[t]
                          for t in rep.thresholds},
    })
    run.verify("diffusion_computed", True)
    dens = ", ".join(f">{t}: {rep.densities[t]:.4f}" for t in rep.thresholds)
    print(f"ranks to j={j_max}; density {dens}")


def cmd_randomize(cfg: ExperimentConfig, run: Run, args) -> None:
    if cfg.rule is None:
        raise SpecError("config: randomize needs a rule")
    n_max = cfg.param("n_max")
    if not isinstance(n_max, int) or n_max < 1:
        raise SpecError("config.n_max: need a positive integer")
    dec = None
    fibre_group = cfg.group if cfg.group.is_abelian else None
    quot_group = None
    if cfg.frame is not None:
        dec = decompose_mca(cfg.rule, cfg.frame, cap=args.cap_states)
        run.verify("recompose_check", bool(dec.verified))
        fibre_group = cfg.frame.a_group
        quot_group = dec.h_rule.group
    if cfg.param("measures") is not None:
        if cfg.frame is None:
            raise SpecError("config.measures: per-factor measures need a "
                            "frame")
        both = cfg.param("measures")
        lam = parse_measure(cfg.frame.a_group.order,
                            _spec_field(both, "lambda"), "measures.lambda")
        nu = parse_measure(quot_group.order,
                           _spec_field(both, "nu"), "measures.nu")
        init = (lam, nu)
    else:
        init = parse_measure(cfg.group.order,
                             cfg.param("init") or {"kind": "uniform"},
                             "init")
    probes = [parse_probe(p, f"probes[{i}]", fibre_group, quot_group)
              for i, p in enumerate(cfg.param("probes", []))]
    seed = args.seed if args.seed is not None else cfg.param("seed")
    run.extra["seed"] = seed  # record the effective seed, flag or config
    rep = cesaro_randomization(
        cfg.rule, init, n_max, probes=probes, frame=cfg.frame, dec=dec,
        tv_cells=int(cfg.param("tv_cells", 1)),
        cap_states=args.cap_states,
        mc_samples=int(cfg.param("mc_samples", 0)),
        mc_checkpoints=cfg.param("mc_checkpoints"),
        seed=seed, workers=args.workers)
    header = ["n", "probe_id", "coef_abs", "cesaro_mean", "tv_distance",
              "cesaro_tv", "mode", "samples", "stderr"]
    rows = []
    probe_by_n: dict[int, list] = {}
    for r in rep.probe_rows:
        probe_by_n.setdefault(r.n, []).append(r)
    tv_by_n = {r.n: r for r in rep.tv_rows}
    for n in sorted(set(probe_by_n) | set(tv_by_n)):
        if n in tv_by_n:
            t = tv_by_n[n]
            rows.append([n, "", "", "", t.tv_distance, t.cesaro_tv,
                         t.mode, t.samples, t.stderr])
        for r in probe_by_n.get(n, ()):
            rows.append([n, r.probe_id, r.coef_abs, r.cesaro_mean, "", "",
                         r.mode, r.samples, r.stderr])
    _write_csv(run.add("randomize.csv"), header, rows)
    run.verify("randomization_computed", True)
    run.extra["n_exact"] = rep.n_exact
    run.extra["coprimality_ok"] = rep.coprimality_ok
    last_tv = rep.tv_rows[-1]
    print(f"n_exact {rep.n_exact}; final cesaro TV {last_tv.cesaro_tv:.6f} "
          f"({last_tv.mode})")


def _spec_field(obj, key):
    if not isinstance(obj, dict) or key not in obj:
        raise SpecError(f"config.measures: missing field {key!r}")
    return obj[key]


# ---------------------------------------------------------------------------

_COMMANDS = {
    "group": cmd_group,
    "decompose": cmd_decompose,
    "permute": cmd_permute,
    "entropy": cmd_entropy,
    "diffuse": cmd_diffuse,
    "randomize": cmd_randomize,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcalab",
        description="Multiplicative cellular automata experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    env_workers = os.environ.get("MCA_LAB_WORKERS")
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--workers", type=int,
                       default=int(env_workers) if env_workers else 1)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--cap-states", dest="cap_states", type=int,
                       default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_experiment(args.config)
        if args.cap_states is None:  # flag beats config beats default
            cap = cfg.param("cap_states", STATE_CAP_DEFAULT)
            if not isinstance(cap, int) or isinstance(cap, bool) or cap < 1:
                raise SpecError("config.cap_states: need a positive integer")
            args.cap_states = cap
        run = Run(args, args.command)
        _COMMANDS[args.command](cfg, run, args)
        return run.finish(args)
    except SpecError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except McaLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
