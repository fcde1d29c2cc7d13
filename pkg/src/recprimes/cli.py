"""Command-line frontend: census, densities, predictions, covering checks,
constants, moments, and cross-checks, with JSON/CSV/table rendering.

Every run embeds its RunConfig in the JSON output so a report is
reproducible from the report alone.  Progress heartbeats go to stderr,
never into the data stream.  Exit codes: 0 success, 1 computational
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import threading
import time
from dataclasses import dataclass

from . import covering, density, heuristics
from .arith import DomainError, PrpPolicy
from .bigseq import parse_seq_spec
from .census import CensusReport, Hit, oeis_crosscheck, parse_bfile
from .census import census as run_census
from .density import DensityReport
from .heuristics import ConstantEstimate, MomentReport, OmegaReport
from .moddyn import IncompleteSupport, NotInvertible


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    args: dict

    def to_dict(self) -> dict:
        return {"subcommand": self.subcommand, "args": self.args}


# ---------------------------------------------------------------------------
# report rendering (stable field order, explicit float precision)
# ---------------------------------------------------------------------------


def _census_dict(r: CensusReport) -> dict:
    return {
        "type": "census",
        "spec": r.spec,
        "N": r.N,
        "count": r.count,
        "hits": [[h.n, h.digits, h.verdict, h.method] for h in r.hits],
        "checkpoints": {str(k): v for k, v in r.checkpoints.items()},
        "policy": r.policy_fingerprint,
        "pruned": r.pruned,
        "abs": r.abs_mode,
        "tested": r.tested,
        "wall_time": r.wall_time,
    }


def _density_dict(r: DensityReport) -> dict:
    return {
        "type": "delta",
        "y": r.y,
        "Ly": r.window_length,
        "count": r.coprime_count,
        "window_start": r.window_start,
        "phi_num": r.phi_ratio.numerator,
        "phi_den": r.phi_ratio.denominator,
        "delta_num": r.delta.numerator,
        "delta_den": r.delta.denominator,
        "delta": f"{float(r.delta):.4f}",
        "support": json.loads(r.support.to_json()),
    }


def render_report(report, fmt: str = "json", config: RunConfig | None = None) -> str:
    """Serialize a report; `partial: true` is carried for partial results."""
    if isinstance(report, CensusReport) and fmt == "csv":
        lines = ["n,digits,verdict,method"]
        lines += [f"{h.n},{h.digits},{h.verdict},{h.method}" for h in report.hits]
        return "\n".join(lines) + "\n"
    if isinstance(report, CensusReport) and fmt == "table":
        lines = [f"census {report.spec}  N={report.N}  count={report.count}"]
        lines += [f"  10^{len(str(k)) - 1}: {v}" for k, v in sorted(report.checkpoints.items())]
        return "\n".join(lines) + "\n"
    doc = _to_dict(report)
    if config is not None:
        doc["config"] = config.to_dict()
    return json.dumps(doc, indent=2) + "\n"


def _to_dict(report) -> dict:
    if isinstance(report, CensusReport):
        return _census_dict(report)
    if isinstance(report, DensityReport):
        return _density_dict(report)
    if isinstance(report, ConstantEstimate):
        return {
            "type": "constant",
            "value": report.value,
            "value_str": report.value_str,
            "truncation": report.truncation,
            "direction": report.direction,
        }
    if isinstance(report, MomentReport):
        return {
            "type": "moments",
            "N": report.N,
            "B": report.B,
            "k": report.k,
            "empirical": report.empirical,
            "prediction": report.prediction,
            "partial": report.partial,
            "completed_b": report.completed_b,
            "per_b": {str(b): c for b, c in sorted(report.per_b.items())},
        }
    if isinstance(report, OmegaReport):
        return {
            "type": "omega-stats",
            "spec": report.spec,
            "N": report.N,
            "convention": report.convention,
            "observed": report.observed,
            "prediction": report.prediction,
            "lower_bound": report.flagged_lower_bound,
            "incomplete": list(report.incomplete_indices),
            "values": {str(n): v for n, v in sorted(report.values.items())},
        }
    if isinstance(report, dict):
        return report
    raise DomainError(f"cannot render {type(report).__name__}")


def parse_report(text: str):
    """Inverse of render_report for JSON; returns (report, config|None)."""
    doc = json.loads(text)
    config = None
    if "config" in doc:
        config = RunConfig(doc["config"]["subcommand"], doc["config"]["args"])
    t = doc.get("type")
    if t == "census":
        report = CensusReport(
            spec=doc["spec"],
            N=doc["N"],
            hits=[Hit(*h) for h in doc["hits"]],
            checkpoints={int(k): v for k, v in doc["checkpoints"].items()},
            policy_fingerprint=doc["policy"],
            wall_time=doc["wall_time"],
            pruned=doc["pruned"],
            abs_mode=doc["abs"],
            tested=doc["tested"],
        )
        return report, config
    if t == "moments":
        return (
            MomentReport(
                doc["N"],
                doc["B"],
                doc["k"],
                doc["empirical"],
                doc["prediction"],
                {int(b): c for b, c in doc["per_b"].items()},
                doc["partial"],
                doc["completed_b"],
            ),
            config,
        )
    if t == "omega-stats":
        return (
            OmegaReport(
                doc["spec"],
                doc["N"],
                doc["convention"],
                doc["observed"],
                doc["prediction"],
                doc["lower_bound"],
                {int(n): v for n, v in doc["values"].items()},
                tuple(doc["incomplete"]),
            ),
            config,
        )
    return doc, config


class _Heartbeat:
    """Elapsed-time lines on stderr every `every` seconds while computing."""

    def __init__(self, label: str, every: float = 10.0):
        self.label = label
        self.every = every
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._run, daemon=True)

    def _run(self):
        t0 = time.time()
        while not self._stop.wait(self.every):
            print(f"# {self.label}: {time.time() - t0:.0f}s elapsed", file=sys.stderr)

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._stop.set()


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="recprimes")
    ap.add_argument("--config", help="JSON file with default flag values")
    sub = ap.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("census", help="count prime terms u_n, 1 <= n <= N")
    c.add_argument("--seq", required=True)
    c.add_argument("--N", type=int, required=True)
    c.add_argument("--threads", type=int, default=1)
    c.add_argument("--resume", default=None)
    c.add_argument("--abs", action="store_true", help="count |u_n| prime instead of positive-only")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", choices=("csv", "json", "table"), default="json")

    d = sub.add_parser("delta", help="exact density delta_u(R_y)")
    d.add_argument("--seq", required=True)
    d.add_argument("--y", type=int, required=True)
    d.add_argument("--exact", action="store_true", help="also cross-check with inclusion-exclusion")

    p = sub.add_parser("predict", help="delta * log_alpha N")
    p.add_argument("--seq", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--y", type=int, required=True)

    cov = sub.add_parser("covering", help="covering-system verification")
    csub = cov.add_subparsers(dest="covcmd", required=True)
    cv = csub.add_parser("verify")
    cv.add_argument("--seq", default=None)
    cv.add_argument("--file", required=True)
    ce = csub.add_parser("erdos")
    ce.add_argument("--a", type=int, default=None)

    k = sub.add_parser("constants", help="numeric constants at a truncation")
    k.add_argument("which", choices=("c2", "cv", "cvlb", "ck", "beta"))
    k.add_argument("--param", type=int, required=True, help="p_max or d_max (or k for beta)")
    k.add_argument("--k", type=int, default=2, help="k for the ck constant")

    m = sub.add_parser("moments", help="moments of census counts over odd b")
    m.add_argument("--N", type=int, required=True)
    m.add_argument("--B", type=int, required=True)
    m.add_argument("--k", type=int, default=1)
    m.add_argument("--threads", type=int, default=1)
    m.add_argument("--budget", type=float, default=None, help="seconds before returning partial")

    o = sub.add_parser("omega-stats", help="mean Omega(u_n) experiment")
    o.add_argument("--seq", required=True)
    o.add_argument("--N", type=int, required=True)
    o.add_argument("--range", choices=("upto", "dyadic"), default="dyadic")

    b = sub.add_parser("beta", help="extreme-value roots beta_k < k < gamma_k")
    b.add_argument("--k", type=int, required=True)

    x = sub.add_parser("crosscheck", help="diff a census report against an OEIS b-file")
    x.add_argument("--report", required=True)
    x.add_argument("--bfile", required=True)
    return ap


def _apply_config_file(argv: list[str]) -> list[str]:
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    with open(argv[i + 1]) as fh:
        defaults = json.load(fh)
    rest = argv[:i] + argv[i + 2 :]
    extra: list[str] = []
    for key, val in defaults.items():
        flag = f"--{key}"
        if flag not in rest:
            extra += [flag, str(val)]
    return rest + extra


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config_file(argv)
    except (OSError, json.JSONDecodeError) as e:
        print(f"error: bad config file: {e}", file=sys.stderr)
        return 2
    ap = _build_parser()
    ns = ap.parse_args(argv)
    cfg = RunConfig(ns.cmd, {k: v for k, v in vars(ns).items() if k not in ("cmd", "config") and v is not None})
    try:
        return _dispatch(ns, cfg)
    except (DomainError, IncompleteSupport, NotInvertible, density.NotExponentiallyGrowing, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def _dispatch(ns, cfg: RunConfig) -> int:
    out = sys.stdout
    if ns.cmd == "census":
        rec = parse_seq_spec(ns.seq)
        policy = PrpPolicy(seed=ns.seed)
        with _Heartbeat(f"census {ns.seq}"):
            report = run_census(
                rec, ns.N, policy=policy, workers=ns.threads, resume_path=ns.resume, abs_mode=ns.abs
            )
        out.write(render_report(report, ns.out, cfg))
        return 0
    if ns.cmd == "delta":
        rec = parse_seq_spec(ns.seq)
        report = density.delta(rec, ns.y)
        if ns.exact:
            check = density.delta(rec, ns.y, strategy="ie")
            if check.delta != report.delta:
                print("error: strategy disagreement", file=sys.stderr)
                return 1
        out.write(render_report(report, "json", cfg))
        return 0
    if ns.cmd == "predict":
        rec = parse_seq_spec(ns.seq)
        value = density.predict_count(rec, ns.N, ns.y)
        out.write(render_report({"type": "predict", "seq": ns.seq, "N": ns.N, "y": ns.y, "value": round(value, 3)}, "json", cfg))
        return 0
    if ns.cmd == "covering":
        if ns.covcmd == "erdos":
            res = covering.erdos_construction(ns.a)
            out.write(render_report({
                "type": "erdos",
                "a": str(res.a),
                "b": str(res.b),
                "residue": str(res.residue),
                "modulus": str(res.modulus),
                "verified": res.verified,
            }, "json", cfg))
            return 0 if res.verified else 1
        rec = parse_seq_spec(ns.seq) if ns.seq else None
        system, rec = covering.load_system(ns.file, rec)
        if rec is None:
            result = covering.verify_covers(system)
            doc = {"type": "covering", "covers": result.covers, "first_uncovered": result.first_uncovered}
            ok = result.covers
        else:
            result = covering.verify_sequence_covering(rec, system)
            doc = {
                "type": "covering",
                "seq": rec.spec_string(),
                "ok": result.ok,
                "covers": result.coverage.covers,
                "first_uncovered": result.coverage.first_uncovered,
                "failed_congruence": (
                    [result.failed_congruence.residue, result.failed_congruence.modulus, result.failed_congruence.prime]
                    if result.failed_congruence
                    else None
                ),
            }
            ok = result.ok
        out.write(render_report(doc, "json", cfg))
        return 0 if ok else 1
    if ns.cmd == "constants":
        if ns.which == "c2":
            report = heuristics.twin_constant(ns.param)
        elif ns.which == "cv":
            report = heuristics.cv_constant(ns.param)
        elif ns.which == "cvlb":
            report = heuristics.cv_lower_bound(ns.param)
        elif ns.which == "ck":
            report = heuristics.ck_constant(ns.k, ns.param)
        else:
            beta, gamma = heuristics.beta_gamma(ns.param)
            out.write(f"{beta:.6f} {gamma:.6f}\n")
            return 0
        out.write(render_report(report, "json", cfg))
        return 0
    if ns.cmd == "moments":
        with _Heartbeat(f"moments N={ns.N} B={ns.B}"):
            report = heuristics.empirical_moments(ns.N, ns.B, ns.k, workers=ns.threads, max_seconds=ns.budget)
        out.write(render_report(report, "json", cfg))
        return 0
    if ns.cmd == "omega-stats":
        rec = parse_seq_spec(ns.seq)
        with _Heartbeat(f"omega-stats {ns.seq}"):
            report = heuristics.mean_omega_experiment(rec, ns.N, range_convention=ns.range)
        out.write(render_report(report, "json", cfg))
        return 0
    if ns.cmd == "beta":
        beta, gamma = heuristics.beta_gamma(ns.k)
        out.write(f"{beta:.6f} {gamma:.6f}\n")
        return 0
    if ns.cmd == "crosscheck":
        with open(ns.report) as fh:
            report, _ = parse_report(fh.read())
        with open(ns.bfile) as fh:
            entries = parse_bfile(fh.read())
        diff = oeis_crosscheck(report, entries)
        out.write(render_report({
            "type": "crosscheck",
            "limit": diff.limit,
            "only_in_report": list(diff.only_in_report),
            "only_in_bfile": list(diff.only_in_bfile),
            "match": diff.empty,
        }, "json", cfg))
        return 0 if diff.empty else 1
    raise DomainError(f"unknown subcommand {ns.cmd}")


if __name__ == "__main__":
    raise SystemExit(main())
