"""
Command-line surface of the toolkit.

Every subcommand loads its inputs, calls one library operation and prints the result,
either as text or, with ``--json``, as a stable JSON document. Verdict commands exit
0 for true / agreement and 1 for false / disagreement; usage errors, missing files and
library errors exit 2; resource-guard errors exit 3.
"""

import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

from bisim.conditions import VerifyReport
from bisim.family import BisimFamily, decide_equiv, max_kl_family, verify_kl_family
from bisim.omega import is_quasi_injective, qinj_to_family, verify_omega_family, verify_plain_bisim
from errors import HybisError, ModelError, ResourceGuardError
from logic.fol import fol_to_text, free_vars
from logic.parser import infer_signature, parse_fol, parse_hybrid
from logic.semantics import HybridContext, sat_fol, sat_hybrid
from logic.syntax import (Feature, Signature, default_k, degree, format_features, free_wvars,
                          parse_features, size, to_text)
from logic.translate import psi_sigma, relativise, sbt, st
from oracle.search import separating_formula
from oracle.strata import agree_up_to, axiomatise
from settings import *
from world.fixtures import Figure, depth_scope, fixture, fixture_names
from world.kripke import KripkeModel, PairRelation, PointedModel, dump_model, load_model_file

log = logging.getLogger(__name__)

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_GUARD = 3

PACKAGE_LEVELS = {"logic": "logic_level", "world": "world_level", "bisim": "bisim_level", "oracle": "oracle_level"}


def setup_logging(config: Dict[str, Any]):
    """
    Configure logging based on the configuration dictionary.

    Args:
        config (Dict[str, Any]): Configuration dictionary containing logging settings.
    """
    log_config = config.get("logging", {})

    base_level = log_config.get("base_level", "WARNING")
    logging.basicConfig(level=getattr(logging, base_level))

    for package, key in PACKAGE_LEVELS.items():
        level = log_config.get(key)
        if level:
            logging.getLogger(package).setLevel(getattr(logging, level))


def load_config(config_path: str) -> Dict[str, Any]:
    """
    Load and parse the JSON configuration file.

    Args:
        config_path (str): Path to the JSON configuration file.

    Returns:
        Dict[str, Any]: Parsed configuration dictionary.

    Raises:
        FileNotFoundError: If the file is not found.
        json.JSONDecodeError: If the JSON is invalid.
    """
    try:
        with open(config_path, 'r') as f:
            config = json.load(f)
        print(_paint(f"[CONFIG] Loaded configuration from: {config_path}", CYAN), file=sys.stderr)
        return config
    except FileNotFoundError:
        print(f"[ERROR] Configuration file not found: {config_path}", file=sys.stderr)
        raise
    except json.JSONDecodeError as e:
        print(f"[ERROR] Invalid JSON in configuration file: {e}", file=sys.stderr)
        raise


def _paint(text: str, colour: str, plain: bool = False) -> str:
    if plain or not sys.stdout.isatty():
        return text
    return f"{colour}{text}{RESET}"


def _emit(args: argparse.Namespace, doc: Dict[str, Any], text: str, colour: str = "") -> None:
    if args.json:
        print(json.dumps(doc, sort_keys=True))
    else:
        print(_paint(text, colour) if colour else text)


def _verdict(args: argparse.Namespace, value: bool, doc: Dict[str, Any], extra: Optional[str] = None) -> int:
    text = "true" if value else "false"
    if extra:
        text += "\n" + extra
    _emit(args, {"verdict": value, **doc}, text, GREEN if value else RED)
    return EXIT_TRUE if value else EXIT_FALSE


# --- inputs -------------------------------------------------------------------

def _model_path(path: str) -> str:
    if os.path.exists(path) or os.path.isabs(path):
        return path
    candidate = os.path.join(MODELS_DIR, path)
    return candidate if os.path.exists(candidate) else path


def _load_signature(path: str) -> Signature:
    with open(path, "r") as f:
        doc = json.load(f)
    if not isinstance(doc, dict):
        raise ModelError("a signature file must hold a JSON object")
    return Signature(tuple(doc.get("props", ())), tuple(doc.get("noms", ())),
                     tuple(doc.get("preds", ())), tuple(doc.get("consts", ())))


def _models(args: argparse.Namespace, paths: Sequence[str]) -> Tuple[Signature, List[KripkeModel]]:
    """Load model files under ``--sig``, or under the union of their own signatures."""
    if args.sig:
        sig = _load_signature(args.sig)
        return sig, [load_model_file(_model_path(p), sig.core()) for p in paths]
    models = [load_model_file(_model_path(p)) for p in paths]
    sig = Signature()
    for m in models:
        sig = sig.union(m.signature)
    return sig, [m.with_signature(sig) for m in models]


def _text_signature(args: argparse.Namespace, *texts: str, fol: bool = False) -> Signature:
    if args.sig:
        return _load_signature(args.sig)
    sig = Signature()
    for text in texts:
        sig = sig.union(infer_signature(text, fol))
    return sig


def _assignment(args: argparse.Namespace) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    names, worlds = [], []
    for item in args.assign or []:
        name, sep, world = item.partition("=")
        if not sep or not name or not world:
            raise ModelError(f"--assign expects name=world, got {item!r}")
        names.append(name.lstrip("?"))
        worlds.append(world)
    return tuple(names), tuple(worlds)


def _limit(args: argparse.Namespace, config: Dict[str, Any], flag: str, env: str, key: str, default: int) -> int:
    return resolve_limit(getattr(args, flag), env, config.get("limits", {}).get(key, default))


def _max_pairs(args, config) -> int:
    return _limit(args, config, "max_pairs", MAX_PAIRS_ENV, "max_pairs", DEFAULT_MAX_PAIRS)


def _cap(args, config) -> int:
    return _limit(args, config, "cap", ORACLE_CAP_ENV, "oracle_cap", DEFAULT_ORACLE_CAP)


def _pointed(args, left: str, m: str, right: str, n: str) -> Tuple[PointedModel, PointedModel]:
    _, (M, N) = _models(args, [left, right])
    return PointedModel(M, m), PointedModel(N, n)


def _report(args: argparse.Namespace, report: VerifyReport) -> int:
    if args.json:
        print(json.dumps(report.to_json(), sort_keys=True))
    else:
        print(_paint("ok", GREEN) if report.ok else _paint(f"{len(report.violations)} violation(s)", RED))
        for v in report.violations:
            print(f"  {v}")
    return EXIT_TRUE if report.ok else EXIT_FALSE


def _read_json(path: str) -> Any:
    with open(path, "r") as f:
        return json.load(f)


# --- commands -----------------------------------------------------------------

def cmd_parse(args, config) -> int:
    sig = _text_signature(args, args.formula, fol=args.fol)
    if args.fol:
        phi = parse_fol(args.formula, sig)
        doc = {"formula": fol_to_text(phi), "free": sorted(free_vars(phi))}
    else:
        phi = parse_hybrid(args.formula, sig)
        doc = {"formula": to_text(phi), "degree": degree(phi), "size": size(phi),
               "free": sorted(free_wvars(phi))}
    _emit(args, doc, doc["formula"])
    return EXIT_TRUE


def cmd_check(args, config) -> int:
    sig, (model,) = _models(args, [args.model])
    names, worlds = _assignment(args)
    if args.fol:
        phi = parse_fol(args.formula, sig)
        env = dict(zip(names, worlds))
        env.setdefault(STX, args.world)
        unbound = free_vars(phi) - set(env)
        if len(unbound) == 1:
            # a lone free variable stands for the evaluation world
            env[unbound.pop()] = args.world
        value = sat_fol(model, env, phi)
    else:
        phi = parse_hybrid(args.formula, sig)
        value = sat_hybrid(HybridContext(model, worlds, args.world, names), phi)
    return _verdict(args, value, {"world": args.world})


def cmd_st(args, config) -> int:
    sig = _text_signature(args, args.formula)
    result = fol_to_text(st(parse_hybrid(args.formula, sig), args.target))
    _emit(args, {"formula": result}, result)
    return EXIT_TRUE


def cmd_sbt(args, config) -> int:
    sig = _text_signature(args, args.formula, fol=True)
    result = to_text(sbt(parse_fol(args.formula, sig), sig))
    _emit(args, {"formula": result}, result)
    return EXIT_TRUE


def cmd_relativize(args, config) -> int:
    sig = _text_signature(args, args.formula, fol=True)
    result = fol_to_text(relativise(parse_fol(args.formula, sig), args.pred))
    _emit(args, {"formula": result}, result)
    return EXIT_TRUE


def cmd_psi_sigma(args, config) -> int:
    sig = _text_signature(args, args.sigma, args.phi, fol=True)
    formula = psi_sigma(parse_fol(args.sigma, sig), parse_fol(args.phi, sig), args.pred, args.const, sig)
    result = fol_to_text(formula)
    _emit(args, {"formula": result}, result)
    return EXIT_TRUE


def cmd_bisim_verify(args, config) -> int:
    _, (M, N) = _models(args, [args.left, args.right])
    doc = _read_json(args.relation)
    F = parse_features(args.features)
    if "levels" in doc:
        seed = tuple(args.seed.split(",")) if args.seed else None
        return _report(args, verify_kl_family(M, N, BisimFamily.from_json(doc), F, seed))
    if "relations" in doc:
        B = {int(k): PairRelation.from_json({"k": int(k), "pairs": pairs}) for k, pairs in doc["relations"].items()}
        return _report(args, verify_omega_family(M, N, B, F, max(B)))
    return _report(args, verify_plain_bisim(M, N, PairRelation.from_json(doc), Feature.NOM in F))


def cmd_bisim_maximal(args, config) -> int:
    _, (M, N) = _models(args, [args.left, args.right])
    fam = max_kl_family(M, N, parse_features(args.features), args.k or 0, args.l or 0, _max_pairs(args, config))
    summary = "\n".join(f"Z[{k}][{i}]: {len(rel)} pair(s)" for (k, i), rel in sorted(fam.Z.items()))
    _emit(args, fam.to_json(), summary)
    return EXIT_TRUE


def cmd_equiv(args, config) -> int:
    Mp, Np = _pointed(args, args.left, args.m, args.right, args.n)
    F = parse_features(args.features)
    L = args.l or 0
    K = default_k(F, L) if args.k is None else args.k
    value = decide_equiv(Mp, Np, F, L, K, _max_pairs(args, config))
    doc = {"features": format_features(F), "K": K, "L": L}
    extra = None
    if not value:
        separator = separating_formula(Mp, Np, F, K, L, _cap(args, config))
        if separator is not None:
            doc["separator"] = to_text(separator)
            extra = f"separator: {doc['separator']}"
    return _verdict(args, value, doc, extra)


def cmd_oracle_compare(args, config) -> int:
    Mp, Np = _pointed(args, args.left, args.m, args.right, args.n)
    F = parse_features(args.features)
    value = agree_up_to(Mp, Np, F, args.k or 0, args.l or 0, _cap(args, config))
    return _verdict(args, value, {"features": format_features(F), "k": args.k or 0, "L": args.l or 0})


def cmd_oracle_separate(args, config) -> int:
    Mp, Np = _pointed(args, args.left, args.m, args.right, args.n)
    F = parse_features(args.features)
    separator = separating_formula(Mp, Np, F, args.k or 0, args.l or 0, _cap(args, config))
    text = "none" if separator is None else to_text(separator)
    _emit(args, {"separator": None if separator is None else text}, text)
    return EXIT_TRUE if separator is None else EXIT_FALSE


def cmd_axiomatise(args, config) -> int:
    paths, points = [], []
    for item in args.pointed:
        path, sep, world = item.rpartition(":")
        if not sep:
            raise ModelError(f"pointed model must be FILE:WORLD, got {item!r}")
        paths.append(path)
        points.append(world)
    _, models = _models(args, paths)
    Ks = [PointedModel(m, w) for m, w in zip(models, points)]
    F = parse_features(args.features)
    result = to_text(axiomatise(Ks, F, args.l or 0, _cap(args, config), k=args.k))
    _emit(args, {"formula": result}, result)
    return EXIT_TRUE


def _qinj_inputs(args):
    _, (M, N) = _models(args, [args.left, args.right])
    B = PairRelation.from_json(_read_json(args.relation))
    within = depth_scope(N, args.root, args.depth_bound) if args.depth_bound is not None else None
    return M, N, B, within


def cmd_qinj_verify(args, config) -> int:
    M, N, B, within = _qinj_inputs(args)
    return _verdict(args, is_quasi_injective(M, N, B, within), {})


def cmd_qinj_construct(args, config) -> int:
    M, N, B, within = _qinj_inputs(args)
    K = args.k or 0
    family = qinj_to_family(M, N, B, K, within)
    doc = {"Kbound": K, "relations": {str(k): rel.to_json()["pairs"] for k, rel in family.items()}}
    _emit(args, doc, "\n".join(f"B_{k}: {len(rel)} pair(s)" for k, rel in family.items()))
    return EXIT_TRUE


def cmd_fixtures_list(args, config) -> int:
    names = fixture_names()
    _emit(args, {"fixtures": names}, "\n".join(names))
    return EXIT_TRUE


def cmd_fixtures_emit(args, config) -> int:
    built = fixture(args.name, *args.params)
    if isinstance(built, Figure):
        doc = {"left": built.left.to_json(), "right": built.right.to_json(), "relation": built.relation.to_json()}
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            dump_model(built.left, os.path.join(args.out, f"{args.name}_left.json"))
            dump_model(built.right, os.path.join(args.out, f"{args.name}_right.json"))
            with open(os.path.join(args.out, f"{args.name}_relation.json"), "w") as f:
                json.dump(built.relation.to_json(), f, indent=2)
    else:
        doc = built.to_json()
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            dump_model(built, os.path.join(args.out, f"{args.name}.json"))
    print(json.dumps(doc, sort_keys=True, indent=None if args.json else 2))
    return EXIT_TRUE


# --- parser -------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--features", default="", help="comma-separated subset of nom,down,at,exists")
    common.add_argument("--k", type=int, default=None, help="tuple length")
    common.add_argument("--l", type=int, default=None, help="degree / level bound")
    common.add_argument("--max-pairs", dest="max_pairs", type=int, default=None)
    common.add_argument("--cap", type=int, default=None, help="oracle cap")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--assign", action="append", metavar="x=w", help="bind a world variable (repeatable)")
    common.add_argument("--sig", default=None, help="signature JSON file")
    common.add_argument("--config", default=None, help="JSON configuration file")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="hybis", description="Hybrid logic toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(target, name: str, handler, help_text: str) -> argparse.ArgumentParser:
        p = target.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    p = command(sub, "parse", cmd_parse, "parse and pretty-print a formula")
    p.add_argument("formula")
    p.add_argument("--fol", action="store_true", help="first-order syntax")

    p = command(sub, "check", cmd_check, "model-check a formula at a world")
    p.add_argument("model")
    p.add_argument("world")
    p.add_argument("formula")
    p.add_argument("--fol", action="store_true", help="first-order syntax; stx is bound to the world")

    p = command(sub, "st", cmd_st, "standard translation")
    p.add_argument("formula")
    p.add_argument("--target", choices=("x", "y"), default="x")

    p = command(sub, "sbt", cmd_sbt, "back translation of a one-free-variable formula")
    p.add_argument("formula")

    p = command(sub, "relativize", cmd_relativize, "relativise quantifiers to a predicate")
    p.add_argument("formula")
    p.add_argument("--pred", default="U")

    p = command(sub, "psi-sigma", cmd_psi_sigma, "formula of the undecidability reduction")
    p.add_argument("sigma")
    p.add_argument("phi")
    p.add_argument("--pred", default="U")
    p.add_argument("--const", default="d")

    bisim = sub.add_parser("bisim", help="bisimulation families").add_subparsers(dest="action", required=True)
    p = command(bisim, "verify", cmd_bisim_verify, "verify a relation, an omega family or a leveled family")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("relation")
    p.add_argument("--seed", default=None, metavar="m,n")
    p = command(bisim, "maximal", cmd_bisim_maximal, "greatest (K,L) family")
    p.add_argument("left")
    p.add_argument("right")

    p = command(sub, "equiv", cmd_equiv, "decide bounded-degree equivalence of two pointed models")
    for name in ("left", "m", "right", "n"):
        p.add_argument(name)

    oracle = sub.add_parser("oracle", help="formula-enumeration oracle").add_subparsers(dest="action", required=True)
    for name, handler in (("compare", cmd_oracle_compare), ("separate", cmd_oracle_separate)):
        p = command(oracle, name, handler, f"oracle {name}")
        for arg in ("left", "m", "right", "n"):
            p.add_argument(arg)

    p = command(sub, "axiomatise", cmd_axiomatise, "characteristic formula of a finite class")
    p.add_argument("pointed", nargs="+", metavar="FILE:WORLD")

    qinj = sub.add_parser("qinj", help="quasi-injective bisimulations").add_subparsers(dest="action", required=True)
    for name, handler in (("verify", cmd_qinj_verify), ("construct", cmd_qinj_construct)):
        p = command(qinj, name, handler, f"qinj {name}")
        p.add_argument("left")
        p.add_argument("right")
        p.add_argument("relation")
        p.add_argument("--depth-bound", dest="depth_bound", type=int, default=None,
                       help="only check pairs whose right world is closer than this to --root")
        p.add_argument("--root", default="n0")

    fixtures = sub.add_parser("fixtures", help="built-in structures").add_subparsers(dest="action", required=True)
    command(fixtures, "list", cmd_fixtures_list, "list fixture names")
    p = command(fixtures, "emit", cmd_fixtures_emit, "print (and optionally write) a fixture")
    p.add_argument("name")
    p.add_argument("params", nargs="*", type=int)
    p.add_argument("--out", default=None, help="directory to write model files into")
    return parser


def _config(args: argparse.Namespace) -> Dict[str, Any]:
    if args.config:
        return load_config(args.config)
    if os.path.exists(DEFAULT_CONFIG_PATH):
        return load_config(DEFAULT_CONFIG_PATH)
    return {}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse ``argv``, dispatch to the subcommand and map failures to exit codes.

    Returns:
        int: 0/1 verdict, 2 on usage or input errors, 3 when a resource guard trips.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_TRUE if not e.code else EXIT_USAGE
    try:
        config = _config(args)
        setup_logging(config)
        return args.handler(args, config)
    except ResourceGuardError as e:
        print(_paint(f"[ERROR] {e}", YELLOW), file=sys.stderr)
        return EXIT_GUARD
    except (HybisError, FileNotFoundError, json.JSONDecodeError, ValueError) as e:
        print(_paint(f"[ERROR] {e}", RED), file=sys.stderr)
        return EXIT_USAGE
