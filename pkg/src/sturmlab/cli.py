"""Command-line driver: every experiment as a subcommand, JSON config in,
CSV/JSON out, deterministic output at any thread count.

Exit codes: 0 success, 2 configuration error, 3 violated theorem hypothesis,
4 failed internal assertion (e.g. a Sturmian window with nonzero energy).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from .energy import (
    HamiltonianSpec,
    PatternTable,
    density_estimate_stream,
    density_periodic_exact,
    window_energy,
)
from .ergodicity import hitting_count, hitting_scan, lemma_bound_check
from .forbidden import ForbiddenModel, forbidden_set, verify_characterization, zero_run_bound
from .parallel import default_threads
from .quadirr import Arc, QuadIrrError, QuadraticIrrational, badly_constant_scan, cf_expand, make_quad
from .stability import family_word, stability_scan_family, stability_scan_periodic
from .words import LEFT_CLOSED, RIGHT_CLOSED, PeriodicWord, SturmianWord, word_from_string

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_HYPOTHESIS = 3
EXIT_INTERNAL = 4


class ConfigError(Exception):
    pass


class HypothesisError(Exception):
    pass


class InternalCheckError(Exception):
    pass


def fmt(x) -> str:
    """CSV cell: '.' decimal, 17 significant digits for reals."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def write_csv(path: str | None, header: list[str], rows: list[tuple]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(c) for c in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def write_json(path: str | None, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def parse_quad(text: str) -> QuadraticIrrational:
    try:
        parts = [int(v) for v in str(text).replace(" ", "").split(",")]
        if len(parts) != 4:
            raise ValueError
        return make_quad(*parts)
    except QuadIrrError:
        raise
    except ValueError:
        raise ConfigError(f"expected p,q,r,d integers, got {text!r}")


def require_irrational(phi: QuadraticIrrational) -> QuadraticIrrational:
    if phi.is_rational:
        raise HypothesisError("phi must be irrational")
    return phi


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _cfg_get(args, cfg: dict, flag: str, key: str, default=None):
    val = getattr(args, flag, None)
    if val is not None:
        return val
    if key in cfg:
        return cfg[key]
    # nested ranges / tolerances / output
    for group in ("ranges", "tolerances", "output"):
        sub = cfg.get(group, {})
        if isinstance(sub, dict) and key in sub:
            return sub[key]
    return default


def _phi_from(args, cfg) -> QuadraticIrrational:
    raw = _cfg_get(args, cfg, "phi", "phi")
    if raw is None:
        raise ConfigError("phi is required (flag --phi or config key 'phi')")
    if isinstance(raw, (list, tuple)):
        return make_quad(*[int(v) for v in raw])
    return parse_quad(raw)


def _patterns_from(args, cfg) -> list[str]:
    raw = _cfg_get(args, cfg, "patterns", "pattern_set")
    maxlen = _cfg_get(args, cfg, "pattern_max_len", "pattern_max_len")
    if raw is not None:
        if isinstance(raw, str):
            return [p for p in raw.split(",") if p]
        return [str(p) for p in raw]
    if maxlen is not None:
        maxlen = int(maxlen)
        out = []
        for L in range(1, maxlen + 1):
            out.extend(format(i, f"0{L}b") for i in range(2**L))
        return out
    return []


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    cfg = _load_config(args.config)
    phi = require_irrational(_phi_from(args, cfg))
    x0 = parse_quad(args.x0) if args.x0 else QuadraticIrrational(0, 0, 1, 1)
    convention = _cfg_get(args, cfg, "convention", "convention", LEFT_CLOSED)
    if convention not in (LEFT_CLOSED, RIGHT_CLOSED):
        raise ConfigError(f"unknown convention {convention!r}")
    n = int(_cfg_get(args, cfg, "n", "scan_N", 0))
    word = SturmianWord(phi, x0, convention)
    text = word.window(0, n - 1).to01() if n > 0 else ""
    out = text + "\n" if text else ""
    if args.output in (None, "-"):
        sys.stdout.write(out)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    return EXIT_OK


def cmd_forbidden(args) -> int:
    cfg = _load_config(args.config)
    phi = require_irrational(_phi_from(args, cfg))
    k_max = int(_cfg_get(args, cfg, "k_max", "k_max", 10))
    scan_n = int(_cfg_get(args, cfg, "scan_n", "scan_N", 10**5))
    try:
        model = ForbiddenModel(phi)
    except QuadIrrError as exc:
        raise HypothesisError(str(exc))
    ks = forbidden_set(model, k_max)
    m = zero_run_bound(model, scan_n)
    if args.verify:
        word_n = int(args.word_n or 10**6)
        report = verify_characterization(model, word_n, k_max)
        write_json(args.output, report.to_json_dict())
        if report.violations:
            raise InternalCheckError(
                f"absence violations detected: {report.violations}")
        return EXIT_OK
    if args.json:
        write_json(args.output, {"forbidden": ks, "m": m})
    else:
        lines = [str(k) for k in ks] + [f"m={m}"]
        text = "\n".join(lines) + "\n"
        if args.output in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
    return EXIT_OK


def _arc_from(args, phi: QuadraticIrrational) -> Arc:
    if args.arc:
        try:
            lo_txt, hi_txt = args.arc.split(":")
        except ValueError:
            raise ConfigError("--arc expects 'p,q,r,d:p,q,r,d'")
        return Arc(parse_quad(lo_txt), parse_quad(hi_txt))
    return Arc(1 - phi, phi)


def cmd_ergodicity(args) -> int:
    cfg = _load_config(args.config)
    phi = require_irrational(_phi_from(args, cfg))
    arc = _arc_from(args, phi)
    if (arc.length() * 2 - 1).sign() < 0:
        raise HypothesisError("arc must have length >= 1/2 "
                              "(fast-ergodicity hypothesis)")
    x0 = parse_quad(args.x0) if args.x0 else QuadraticIrrational(0, 0, 1, 1)
    k_min = int(_cfg_get(args, cfg, "k_min", "k_min", 10))
    k_max = int(_cfg_get(args, cfg, "k_max", "k_max", 500))
    if args.d is not None:
        d = int(args.d)
    else:
        cest_kmax = int(_cfg_get(args, cfg, "cest_kmax", "cest_kmax", 10**5))
        d = badly_constant_scan(phi, cest_kmax).d
    results, summary = hitting_scan(phi, x0, arc, range(k_min, k_max + 1), d,
                                    threads=args.threads)
    write_csv(args.output, ["k", "n_bracket", "case_id", "hits", "bound", "pass"],
              [r.csv_row() for r in results])
    if args.summary:
        write_json(args.summary, summary.to_json_dict())
    return EXIT_OK


def _hamiltonian_from(args, cfg, phi) -> HamiltonianSpec:
    if args.ham:
        with open(args.ham, encoding="utf-8") as fh:
            return HamiltonianSpec.from_json_dict(json.load(fh))
    alpha = _cfg_get(args, cfg, "alpha", "alpha")
    if alpha is None:
        raise ConfigError("alpha is required")
    alpha = float(alpha)
    if alpha <= 1:
        raise HypothesisError("alpha must exceed 1 (summability hypothesis)")
    try:
        model = ForbiddenModel(phi)
    except QuadIrrError as exc:
        raise HypothesisError(str(exc))
    lam = float(_cfg_get(args, cfg, "lam", "lambda", 0.0))
    table = PatternTable({}, lam)
    deltas = _cfg_get(args, cfg, "deltas", "perturbation")
    if deltas:
        if isinstance(deltas, str):
            entries = {}
            for item in deltas.split(","):
                pat, val = item.split("=")
                entries[pat] = float(val)
        else:
            entries = {e["pattern"]: float(e["delta"]) for e in deltas}
        table = PatternTable(entries, lam)
    return HamiltonianSpec(alpha, model, perturbation=table)


def _word_from(args, cfg, phi):
    desc = args.word if args.word is not None else cfg.get("word", "sturmian")
    if isinstance(desc, dict):        # PeriodicWord JSON form {period, phase}
        return PeriodicWord.from_json_dict(desc)
    if desc == "sturmian":
        return SturmianWord(phi)
    if desc.startswith("periodic:"):
        parts = desc.split(":")
        period = parts[1]
        phase = int(parts[2]) if len(parts) > 2 else 0
        return PeriodicWord(word_from_string(period), phase=phase)
    if desc.startswith("family:"):
        parts = desc.split(":")
        n = int(parts[1])
        variant = parts[2] if len(parts) > 2 else "formula"
        return family_word(phi, n, variant)
    raise ConfigError(f"unknown word descriptor {desc!r}")


def cmd_density(args) -> int:
    cfg = _load_config(args.config)
    phi = require_irrational(_phi_from(args, cfg))
    H = _hamiltonian_from(args, cfg, phi)
    word = _word_from(args, cfg, phi)
    if args.exact:
        if not isinstance(word, PeriodicWord):
            raise ConfigError("--exact requires a periodic word")
        tol = float(_cfg_get(args, cfg, "tol", "density_tol", 1e-9))
        est = density_periodic_exact(H, word, tol=tol)
    else:
        stride = int(_cfg_get(args, cfg, "stride_k", "stride_k", 1))
        m_max = int(_cfg_get(args, cfg, "m_max", "m_max", 64))
        est = density_estimate_stream(H, word, stride, m_max,
                                      horizon=int(args.horizon))
    if isinstance(word, SturmianWord) and est.value != 0.0:
        raise InternalCheckError(
            "Sturmian window produced nonzero energy density "
            f"{est.value!r}; exact arithmetic is broken")
    write_csv(args.output, ["window_size", "energy", "density"],
              est.csv_rows())
    if args.summary:
        write_json(args.summary, {
            "value": est.value, "is_exact": est.is_exact,
            "tail_bound": est.tail_bound, "tail_estimate": est.tail_estimate,
        })
    return EXIT_OK


def cmd_stability_periodic(args) -> int:
    cfg = _load_config(args.config)
    phi = require_irrational(_phi_from(args, cfg))
    alpha = float(_cfg_get(args, cfg, "alpha", "alpha", 1.4))
    lam = float(_cfg_get(args, cfg, "lam", "lambda", 0.0))
    patterns = _patterns_from(args, cfg)
    k_min = int(_cfg_get(args, cfg, "k_min", "k_min", 2))
    k_max = int(_cfg_get(args, cfg, "k_max", "k_max", 100))
    samples = int(_cfg_get(args, cfg, "samples", "samples_per_k", 4))
    try:
        res = stability_scan_periodic(phi, alpha, lam, patterns,
                                      range(k_min, k_max + 1),
                                      samples_per_k=samples,
                                      threads=args.threads)
    except QuadIrrError as exc:
        raise HypothesisError(str(exc))
    write_csv(args.output,
              ["kind", "parameter", "base_density", "perturbation_gain",
               "margin", "pass"],
              [r.csv_row() for r in res.records])
    if args.summary:
        write_json(args.summary, res.summary_dict())
    return EXIT_OK


def cmd_stability_family(args) -> int:
    cfg = _load_config(args.config)
    phi = require_irrational(_phi_from(args, cfg))
    alpha = float(_cfg_get(args, cfg, "alpha", "alpha", 1.8))
    if alpha <= 1:
        raise HypothesisError("alpha must exceed 1 (summability hypothesis)")
    lam = float(_cfg_get(args, cfg, "lam", "lambda", 0.0))
    n_min = int(_cfg_get(args, cfg, "n_min", "n_min", 20))
    n_max = int(_cfg_get(args, cfg, "n_max", "n_max", 200))
    try:
        res = stability_scan_family(phi, alpha, lam, range(n_min, n_max + 1),
                                    threads=args.threads)
    except QuadIrrError as exc:
        raise HypothesisError(str(exc))
    write_csv(args.output,
              ["kind", "parameter", "base_density", "perturbation_gain",
               "margin", "pass"],
              [r.csv_row() for r in res.records])
    if args.summary:
        write_json(args.summary, res.summary_dict())
    return EXIT_OK


def cmd_cf(args) -> int:
    cfg = _load_config(args.config)
    phi = require_irrational(_phi_from(args, cfg))
    depth = int(_cfg_get(args, cfg, "depth", "depth", 32))
    cf = cf_expand(phi, depth)
    shown = list(cf.quotients(depth)) if cf.periodic_tail else list(cf.partial_quotients)
    payload = {
        "partial_quotients": shown,
        "periodic_tail": (list(cf.periodic_tail) if cf.periodic_tail else None),
        "badly_approximable": cf.bounded_quotients,
    }
    if args.json:
        write_json(args.output, payload)
    else:
        lines = [" ".join(str(a) for a in shown)]
        if cf.periodic_tail:
            lines.append(f"periodic_tail start={cf.periodic_tail.start} "
                         f"length={cf.periodic_tail.length}")
        text = "\n".join(lines) + "\n"
        if args.output in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sturmlab",
        description="Sturmian sequences, forbidden-distance Hamiltonians and "
                    "stability experiments with exact circle arithmetic.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config; flags override its keys")
        p.add_argument("--phi", help="quadratic irrational as p,q,r,d")
        p.add_argument("-o", "--output", help="output path (default stdout)")
        p.add_argument("--threads", type=int, default=default_threads(),
                       help="worker threads (env STURMLAB_THREADS)")

    p = sub.add_parser("generate", help="emit Sturmian symbols as a 0/1 string")
    common(p)
    p.add_argument("--x0", help="initial point as p,q,r,d (default 0)")
    p.add_argument("--convention", choices=[LEFT_CLOSED, RIGHT_CLOSED])
    p.add_argument("--n", type=int, help="number of symbols")
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("forbidden", help="forbidden distances and zero-run bound")
    common(p)
    p.add_argument("--k-max", dest="k_max", type=int)
    p.add_argument("--scan-n", dest="scan_n", type=int)
    p.add_argument("--json", action="store_true", help="JSON instead of text")
    p.add_argument("--verify", action="store_true",
                   help="run the absence/realization verification")
    p.add_argument("--word-n", dest="word_n", type=int,
                   help="window length for --verify")
    p.set_defaults(fn=cmd_forbidden)

    p = sub.add_parser("ergodicity", help="accelerated-orbit hitting scan")
    common(p)
    p.add_argument("--x0")
    p.add_argument("--k-min", dest="k_min", type=int)
    p.add_argument("--k-max", dest="k_max", type=int)
    p.add_argument("--d", type=int, help="override d = ceil(1/c_est)")
    p.add_argument("--cest-kmax", dest="cest_kmax", type=int)
    p.add_argument("--arc", help="arc as 'p,q,r,d:p,q,r,d' (default [1-phi, phi])")
    p.add_argument("--summary", help="write JSON summary here")
    p.set_defaults(fn=cmd_ergodicity)

    p = sub.add_parser("density", help="energy density of a word")
    common(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--lam", "--lambda", dest="lam", type=float)
    p.add_argument("--deltas", help="perturbation 'pat=delta,pat=delta'")
    p.add_argument("--ham", help="HamiltonianSpec JSON file")
    p.add_argument("--word", help="sturmian | periodic:BITS[:PHASE] | family:N[:VARIANT]")
    p.add_argument("--stride-k", dest="stride_k", type=int)
    p.add_argument("--m-max", dest="m_max", type=int)
    p.add_argument("--horizon", type=int, default=1000)
    p.add_argument("--exact", action="store_true",
                   help="exact periodic density instead of streaming")
    p.add_argument("--tol", type=float)
    p.add_argument("--summary", help="write JSON summary here")
    p.set_defaults(fn=cmd_density)

    p = sub.add_parser("stability-periodic",
                       help="margins of periodically Sturmian competitors")
    common(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--lam", "--lambda", dest="lam", type=float)
    p.add_argument("--patterns", help="comma-separated 0/1 patterns")
    p.add_argument("--pattern-max-len", dest="pattern_max_len", type=int,
                   help="all 0/1 words up to this length")
    p.add_argument("--k-min", dest="k_min", type=int)
    p.add_argument("--k-max", dest="k_max", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--summary", help="write JSON summary here")
    p.set_defaults(fn=cmd_stability_periodic)

    p = sub.add_parser("stability-family",
                       help="margins against the nearby-rotation family S_n")
    common(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--lam", "--lambda", dest="lam", type=float)
    p.add_argument("--n-min", dest="n_min", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--summary", help="write JSON summary here")
    p.set_defaults(fn=cmd_stability_family)

    p = sub.add_parser("cf", help="continued fraction expansion dump")
    common(p)
    p.add_argument("--depth", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_cf)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HypothesisError as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except InternalCheckError as exc:
        print(f"internal assertion failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except QuadIrrError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
