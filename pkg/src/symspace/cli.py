"""Command-line front end: build spaces, compute constants, run campaigns.

Exit codes: 0 pass, 2 fail, 3 finding (a printed bound disagrees with the
measurement in a probe run), 1 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .errors import ConfigError, SymspaceError
from .product import ProductSpace, build_product
from .report import CheckResult, VerificationReport
from .simons import Lemma, run_campaign
from .symmetric import PAIR_BUILDERS, curvature_summary, is_rank_one
from .submersion import build_fibration, submersion_summary, fibre_scalar_direct, tau_germ_campaign
from .triple import CandidateSubspace, classify, enveloping_algebra, pi1_injectivity_check, triple_residual

EXIT_PASS, EXIT_ERROR, EXIT_FAIL, EXIT_FINDING = 0, 1, 2, 3
_EXIT = {"pass": EXIT_PASS, "fail": EXIT_FAIL, "finding": EXIT_FINDING}

FAMILY_ALIASES = {"so": "sphere", "su": "cpn", "sp": "hpn", "sphere": "sphere", "cpn": "cpn", "hpn": "hpn"}

SEARCH_SAMPLES = 4096
SEARCH_STEPS = 200


@dataclass
class FactorSpec:
    family: str
    n: int

    def build(self):
        return PAIR_BUILDERS[self.family](self.n)

    def label(self) -> str:
        return f"{self.family}:{self.n}"


@dataclass
class CampaignConfig:
    factor1: FactorSpec | None = None
    factor2: FactorSpec | None = None
    samples: int = 1000
    seed: int = 0
    lambda_max: float | None = None  # None means lambda_tg of the space
    magnitude: float = 1.0
    tol: float = 1e-9
    output_path: str = ""

    def validate(self):
        if not isinstance(self.samples, int) or isinstance(self.samples, bool) or self.samples < 1:
            raise ConfigError("samples", f"must be an integer >= 1, got {self.samples!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed", f"must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.lambda_max is not None and not 0.0 <= self.lambda_max < 1.0:
            raise ConfigError("lambda_max", f"must lie in [0, 1), got {self.lambda_max!r}")
        if not self.tol > 0:
            raise ConfigError("tol", f"must be positive, got {self.tol!r}")
        if self.magnitude < 0:
            raise ConfigError("magnitude", f"must be non-negative, got {self.magnitude!r}")

    def echo(self) -> dict:
        d = asdict(self)
        d["factor1"] = self.factor1.label() if self.factor1 else None
        d["factor2"] = self.factor2.label() if self.factor2 else None
        return d


def parse_factor(text: str, field_name: str = "space") -> FactorSpec:
    try:
        family, n = text.split(":")
        n = int(n)
    except ValueError:
        raise ConfigError(field_name, f"expected family:n, got {text!r}") from None
    if family not in FAMILY_ALIASES:
        raise ConfigError(field_name, f"unknown family {family!r}; use one of {sorted(FAMILY_ALIASES)}")
    return FactorSpec(FAMILY_ALIASES[family], n)


def _factor_from_json(obj, name: str) -> FactorSpec:
    if not isinstance(obj, dict):
        raise ConfigError(name, "must be an object with 'family' and 'n'")
    if "family" not in obj:
        raise ConfigError(f"{name}.family", "missing")
    if "n" not in obj:
        raise ConfigError(f"{name}.n", "missing")
    if obj["family"] not in FAMILY_ALIASES:
        raise ConfigError(f"{name}.family", f"unknown family {obj['family']!r}")
    if not isinstance(obj["n"], int) or isinstance(obj["n"], bool):
        raise ConfigError(f"{name}.n", f"must be an integer, got {obj['n']!r}")
    return FactorSpec(FAMILY_ALIASES[obj["family"]], obj["n"])


def load_config(path: str) -> CampaignConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"malformed JSON at line {exc.lineno} column {exc.colno}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be an object")
    cfg = CampaignConfig()
    known = {"space_spec", "samples", "seed", "lambda_max", "magnitude", "tol", "output_path"}
    for key in raw:
        if key not in known:
            raise ConfigError(key, "unknown field")
    spec = raw.get("space_spec")
    if spec is not None:
        if not isinstance(spec, dict):
            raise ConfigError("space_spec", "must be an object")
        if "factor1" in spec:
            cfg.factor1 = _factor_from_json(spec["factor1"], "space_spec.factor1")
        if "factor2" in spec:
            cfg.factor2 = _factor_from_json(spec["factor2"], "space_spec.factor2")
    for key, kind in (("samples", int), ("seed", int), ("lambda_max", float), ("magnitude", float), ("tol", float), ("output_path", str)):
        if key not in raw:
            continue
        value = raw[key]
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, kind) or isinstance(value, bool):
            raise ConfigError(key, f"expected {kind.__name__}, got {type(value).__name__}")
        setattr(cfg, key, value)
    return cfg


# --- subcommands -----------------------------------------------------------------------------


def _product(cfg: CampaignConfig) -> ProductSpace:
    if cfg.factor1 is None or cfg.factor2 is None:
        raise ConfigError("space_spec", "two factors are required (--f1 and --f2, or --space)")
    return build_product(cfg.factor1.build(), cfg.factor2.build(), samples=SEARCH_SAMPLES, refine_steps=SEARCH_STEPS, seed=cfg.seed)


def cmd_space(cfg: CampaignConfig, args) -> tuple[list, dict]:
    if cfg.factor1 is None:
        raise ConfigError("space_spec.factor1", "missing (--f1 or --space)")
    payload = {"factors": []}
    checks = []
    for spec in (cfg.factor1, cfg.factor2):
        if spec is None:
            continue
        pair = spec.build()
        summary = curvature_summary(pair, SEARCH_SAMPLES, SEARCH_STEPS, cfg.seed)
        payload["factors"].append(summary.to_dict())
    if cfg.factor2 is not None:
        space = _product(cfg)
        rank = is_rank_one(space.pair, SEARCH_SAMPLES, SEARCH_STEPS, cfg.seed)
        payload["product"] = {"name": space.name, "rho": space.rho, "is_rank_one": bool(rank), "min_sec_certificate": rank.certificate}
    return checks, payload


def cmd_constants(cfg: CampaignConfig, args) -> tuple[list, dict]:
    space = _product(cfg)
    return [], {"constants": space.constants.to_dict()}


def simons_campaign(space: ProductSpace, cfg: CampaignConfig, keep_breakdowns: bool = True):
    lam = space.constants.lambda_tg if cfg.lambda_max is None else cfg.lambda_max
    n = cfg.samples
    res = run_campaign(space, lam, n, cfg.magnitude, cfg.seed, keep_breakdowns)
    checks = [
        CheckResult("main_inequality", 0.0, *res.worst(res.main), n),
        CheckResult("symmetry_terms_2_1_4_3", 0.0, *res.worst(-res.symmetry), n),
    ]
    for L in Lemma:
        checks.append(CheckResult(f"lemma_{L.value}", 0.0, *res.worst(res.lemmas[L]), n, finding_mode=L is Lemma.L5))
    m, a = res.worst(res.main)
    l5 = res.lemmas[Lemma.L5]
    payload = {
        "space": space.name,
        "lambda_max": lam,
        "constants": space.constants.to_dict(),
        "summary": {"min_margin": m, "argmin_seed": a},
        "l5_margins": {
            "min": float(l5.min()),
            "median": float(np.median(l5)),
            "max": float(l5.max()),
            "violations": int(np.sum(l5 < -cfg.tol)),
        },
        "breakdowns": res.breakdowns,
    }
    return checks, payload


def cmd_simons(cfg: CampaignConfig, args) -> tuple[list, dict]:
    return simons_campaign(_product(cfg), cfg, keep_breakdowns=not getattr(args, "summary_only", False))


def _load_subspace(path: str):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError("subspace", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("subspace", f"malformed JSON at line {exc.lineno}") from None
    if isinstance(raw, dict):
        raw = raw.get("basis")
    try:
        arr = np.array(raw, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("subspace", "basis must be a list of equal-length number lists") from None
    if arr.ndim != 2:
        raise ConfigError("subspace", "basis must be a list of equal-length number lists")
    return arr


def cmd_triple(cfg: CampaignConfig, args) -> tuple[list, dict]:
    if args.subspace is None:
        raise ConfigError("subspace", "a JSON file with m-coordinate basis rows is required")
    space = _product(cfg) if cfg.factor2 is not None else cfg.factor1.build()
    basis = _load_subspace(args.subspace)
    try:
        sub = CandidateSubspace.spanned_by(space, basis)
    except SymspaceError as exc:
        raise ConfigError("subspace", str(exc)) from None
    return _triple_report(sub)


def _triple_report(sub: CandidateSubspace):
    from .triple import TRIPLE_TOL

    res = triple_residual(sub)
    payload = {"residual": res, "classification": classify(res), "dim": sub.dim}
    checks = [CheckResult("triple_residual", TRIPLE_TOL, TRIPLE_TOL - res, None, 1)]
    if res <= TRIPLE_TOL:
        env = enveloping_algebra(sub)
        inj = pi1_injectivity_check(sub)
        payload.update(
            envelope_dim=env.dim,
            envelope_compact=env.killing_definite,
            applicable=inj.applicable,
            injective=inj.injective,
            sigma_min=inj.sigma_min,
            pi2_operator=inj.pi2_operator,
            reason=inj.reason,
        )
        if inj.applicable:
            checks.append(CheckResult("pi1_injective", 0.0, inj.sigma_min, None, 1))
    else:
        payload.update(envelope_dim=None, injective=None, sigma_min=None)
    return checks, payload


def cmd_submersion(cfg: CampaignConfig, args) -> tuple[list, dict]:
    model = build_fibration(args.model, args.n)
    summary = submersion_summary(model)
    r_direct = fibre_scalar_direct(model)
    germ_samples = min(cfg.samples, args.germ_samples)
    rep = tau_germ_campaign(model, samples=germ_samples, lambda_max=0.5 if cfg.lambda_max is None else cfg.lambda_max, magnitude=cfg.magnitude, seed=cfg.seed)
    checks = [
        CheckResult("fibre_scalar_direct", summary.r, -abs(r_direct - summary.r), None, 1),
        CheckResult("gauss_mixed_gap", 0.0, rep.gauss_gap_min, None, germ_samples),
        CheckResult("gauss_mixed_identity", 0.0, -rep.gauss_identity_error, None, germ_samples),
        CheckResult("mixed_curvature_pointwise", 0.0, rep.pointwise_margin, None, germ_samples),
        CheckResult("tau_bound", summary.tau_bound, rep.tau_margin, None, germ_samples),
        CheckResult("lifted_threshold", summary.k_base_threshold, rep.lift_margin, None, germ_samples),
    ]
    payload = {"summary": summary.to_dict(), "fibre_scalar_direct": r_direct, "germs": rep.to_dict()}
    return checks, payload


def cmd_all(cfg: CampaignConfig, args) -> tuple[list, dict]:
    checks, payload = [], {}
    for name, fn in (("space", cmd_space), ("constants", cmd_constants), ("simons", cmd_simons)):
        c, p = fn(cfg, args)
        checks += [_prefixed(x, name) for x in c]
        payload[name] = p
    for kind, n in (("cpn", 1), ("cpn", 2), ("hpn", 1)):
        sub_args = argparse.Namespace(model=kind, n=n, germ_samples=args.germ_samples)
        c, p = cmd_submersion(cfg, sub_args)
        checks += [_prefixed(x, f"submersion_{kind}{n}") for x in c]
        payload[f"submersion_{kind}{n}"] = p
    space = _product(cfg)
    k = min(space.p, space.N - space.p)
    # a great subsphere of the first factor and the graph-type diagonal
    great = np.eye(space.N)[: max(2, space.p - 1)]
    c, p = _triple_report(CandidateSubspace(space, great))
    checks += [_prefixed(x, "triple_great_sphere") for x in c]
    payload["triple_great_sphere"] = p
    if cfg.factor1 == cfg.factor2:
        diag = np.hstack([np.eye(k), np.eye(k)]) / np.sqrt(2.0)
        c, p = _triple_report(CandidateSubspace(space, diag))
        checks += [_prefixed(x, "triple_diagonal") for x in c]
        payload["triple_diagonal"] = p
    return checks, payload


def _prefixed(check: CheckResult, prefix: str) -> CheckResult:
    check.name = f"{prefix}.{check.name}"
    return check


COMMANDS = {
    "space": cmd_space,
    "constants": cmd_constants,
    "simons-verify": cmd_simons,
    "triple-check": cmd_triple,
    "submersion": cmd_submersion,
    "all": cmd_all,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symspace", description="Rigidity checks for products of compact symmetric spaces.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON CampaignConfig file; explicit flags override it")
    common.add_argument("--f1", help="first factor as family:n (sphere, cpn, hpn or so, su, sp)")
    common.add_argument("--f2", help="second factor as family:n")
    common.add_argument("--space", help="both factors at once, e.g. sphere:3xsphere:3")
    common.add_argument("--samples", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--lambda-max", type=float, dest="lambda_max")
    common.add_argument("--magnitude", type=float)
    common.add_argument("--tol", type=float)
    common.add_argument("--output", help="write the JSON report here instead of standard output")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("space", parents=[common], help="curvature summary of one or two factors")
    sub.add_parser("constants", parents=[common], help="isolation constants of a product")
    p = sub.add_parser("simons-verify", parents=[common], help="random germ campaign for R(A)")
    p.add_argument("--summary-only", action="store_true", help="omit per-germ breakdowns")
    p = sub.add_parser("triple-check", parents=[common], help="Lie triple system and injectivity check")
    p.add_argument("--subspace", help="JSON file: list of basis rows (m-coordinates) or {\"basis\": [...]}")
    p = sub.add_parser("submersion", parents=[common], help="Hopf fibration constants and germ checks")
    p.add_argument("--model", choices=["cpn", "hpn"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--germ-samples", type=int, default=200, dest="germ_samples")
    p = sub.add_parser("all", parents=[common], help="every check on one product")
    p.add_argument("--summary-only", action="store_true")
    p.add_argument("--germ-samples", type=int, default=200, dest="germ_samples")
    return parser


def resolve_config(args) -> CampaignConfig:
    cfg = load_config(args.config) if args.config else CampaignConfig()
    if args.space:
        parts = args.space.replace(",", "x").split("x")
        if len(parts) not in (1, 2):
            raise ConfigError("space", f"expected f1xf2, got {args.space!r}")
        cfg.factor1 = parse_factor(parts[0], "space")
        cfg.factor2 = parse_factor(parts[1], "space") if len(parts) == 2 else None
    if args.f1:
        cfg.factor1 = parse_factor(args.f1, "f1")
    if args.f2:
        cfg.factor2 = parse_factor(args.f2, "f2")
    for key in ("samples", "seed", "lambda_max", "magnitude", "tol"):
        value = getattr(args, key)
        if value is not None:
            setattr(cfg, key, value)
    if args.output:
        cfg.output_path = args.output
    cfg.validate()
    return cfg


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_ERROR
    start = time.perf_counter()
    try:
        cfg = resolve_config(args)
        checks, payload = COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"symspace: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except SymspaceError as exc:
        if isinstance(exc, AssertionError):
            raise
        print(f"symspace: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report = VerificationReport(args.command, cfg.echo(), __version__, cfg.tol, checks, payload)
    report.wall_time = time.perf_counter() - start
    text = report.to_json()
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return _EXIT[report.status]


def main():
    sys.exit(run())
