"""Command line front end.

Subcommands ``spectrum``, ``chain``, ``verify``, ``heatmap`` and ``sweep``
read a run configuration (JSON file via ``--config``, overridden by
individual flags) and write CSV or JSON.

Exit codes: 0 success, 1 verification failure, 2 invalid configuration,
3 numerical failure.
"""

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .biortho import build_biorthogonal
from .chain import MAX_DEPTH, build_metrics, sharp, tree_from_dict, tree_to_dict
from .errors import InvalidSpec, MetricChainError, UnknownNodeLabel
from .linalg import eigvals, fnorm, matrix_to_dict
from .models import ModelSpec, build, model_chain
from .tolerances import DEFAULT
from .verify import full_suite, real_cutoff

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3
COMMANDS = ("spectrum", "chain", "verify", "heatmap", "sweep")
_DEFAULT_FORMAT = {"spectrum": "csv", "chain": "json", "verify": "json", "heatmap": "csv", "sweep": "csv"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Everything a subcommand needs.  ``seeds`` is an inclusive range."""

    model: ModelSpec = None
    depth: int = MAX_DEPTH
    tolerances: dict = field(default_factory=dict)
    output: str = None
    format: str = None
    seeds: tuple = None
    node: str = None
    tree: str = None
    jobs: int = 1

    @property
    def tol(self):
        try:
            return DEFAULT.updated(**self.tolerances)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None


def _num(x):
    return format(float(x), ".17g")


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _parse_pairs(items, what):
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"{what} must look like key=value, got {item!r}")
        out[key.strip()] = _parse_value(value.strip())
    return out


def _parse_seeds(value):
    if value is None:
        return None
    if isinstance(value, str):
        lo, sep, hi = value.partition(":")
        if not sep:
            raise ConfigError(f"seed range must be A:B, got {value!r}")
        value = [lo, hi]
    try:
        lo, hi = (int(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad seed range {value!r}") from None
    if lo < 0 or hi < lo:
        raise ConfigError(f"seed range {lo}:{hi} is empty or negative")
    return lo, hi


def load_config(args):
    """Merge the optional JSON config file with command line flags."""
    data = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    model = data.get("model") or {}
    if not isinstance(model, dict):
        raise ConfigError("'model' must be an object")
    family = model.get("family")
    params = dict(model.get("params") or {})
    if args.family and args.family != family:
        family, params = args.family, {}
    params.update(_parse_pairs(args.param, "--param"))
    cfg = RunConfig(
        model=ModelSpec(family, params) if family else None,
        depth=data.get("depth", MAX_DEPTH),
        tolerances=dict(data.get("tolerances") or {}),
        output=data.get("output"),
        format=data.get("format"),
        seeds=_parse_seeds(data.get("seeds")),
        node=data.get("node"),
        tree=data.get("tree"),
        jobs=data.get("jobs", 1),
    )
    cfg.tolerances.update(_parse_pairs(args.tol, "--tol"))
    for name in ("depth", "output", "format", "node", "tree", "jobs"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if getattr(args, "seeds", None) is not None:
        cfg.seeds = _parse_seeds(args.seeds)
    if not isinstance(cfg.depth, int) or not 0 <= cfg.depth <= MAX_DEPTH:
        raise ConfigError(f"depth must be an integer in 0..{MAX_DEPTH}")
    cfg.format = cfg.format or _DEFAULT_FORMAT[args.command]
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg.format!r}")
    _ = cfg.tol  # validate early
    if cfg.model is not None:
        cfg.model.resolved()
    return cfg


def _need_model(cfg):
    if cfg.model is None:
        raise ConfigError("no model given: use --family/--param or a config file")
    return cfg.model


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj):
    return json.dumps(obj, indent=2) + "\n"


def _write(cfg, text):
    if cfg.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# -- commands ---------------------------------------------------------------


def cmd_spectrum(cfg):
    """Eigenvalues in canonical order, 1-based index."""
    E = eigvals(build(_need_model(cfg)), cfg.tol)
    if cfg.format == "csv":
        text = _csv(["n", "re", "im"], [[n, _num(z.real), _num(z.imag)] for n, z in enumerate(E, 1)])
    else:
        text = _json({"model": cfg.model.to_dict(), "eigenvalues": [[z.real, z.imag] for z in E]})
    _write(cfg, text)
    return EXIT_OK


def _grow(cfg):
    return model_chain(_need_model(cfg), cfg.depth, cfg.tol)


def cmd_chain(cfg):
    """Grow the chain tree and write it as JSON."""
    if cfg.format != "json":
        raise ConfigError("chain trees are written as JSON only")
    _write(cfg, _json(tree_to_dict(_grow(cfg))))
    return EXIT_OK


def load_tree(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return tree_from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot load tree {path}: {exc}") from None


def cmd_verify(cfg):
    """Full invariant suite; exit 0 iff every asserted check passed."""
    tree = load_tree(cfg.tree) if cfg.tree else _grow(cfg)
    report = full_suite(tree, cfg.tol if cfg.tolerances else None)
    if cfg.format == "json":
        text = report.to_json() + "\n"
    else:
        rows = [
            [c.name, _num(c.residual), _num(c.tolerance), c.passed, c.asserted, c.bound]
            for c in report.checks
        ]
        text = _csv(["name", "residual", "tolerance", "passed", "asserted", "bound"], rows)
    _write(cfg, text)
    for c in report.failures():
        print(f"FAILED {c.name}: {c.residual:.3g} vs {c.tolerance:.3g}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAILED


def cmd_heatmap(cfg):
    """Entries of one node's matrix, 1-based ``row,col``."""
    if not cfg.node:
        raise ConfigError("heatmap needs --node")
    tree = load_tree(cfg.tree) if cfg.tree else _grow(cfg)
    if cfg.node not in tree.nodes:
        raise UnknownNodeLabel(f"{cfg.node!r} not in tree; available: {', '.join(tree.labels)}")
    A = tree.nodes[cfg.node].hamiltonian
    if cfg.format == "csv":
        n = len(A)
        rows = [
            [i + 1, j + 1, _num(A[i, j].real), _num(A[i, j].imag)] for i in range(n) for j in range(n)
        ]
        text = _csv(["row", "col", "re", "im"], rows)
    else:
        text = _json({"node": cfg.node, "matrix": matrix_to_dict(A)})
    _write(cfg, text)
    return EXIT_OK


def sweep_row(spec, seed, tol):
    """``(seed, n_real, n_complex, pseudo_hermitian)`` for one disorder seed."""
    spec = ModelSpec(spec.family, {**spec.params, "seed": seed})
    H = build(spec)
    B = build_biorthogonal(H, tol)
    E = B.eigenvalues
    n_real = int(np.sum(np.abs(E.imag) <= real_cutoff(E, tol)))
    M = build_metrics(B, tol)
    r = fnorm(H - sharp(H, M))
    scale = max(1.0, fnorm(H)) * max(1.0, fnorm(M.S_phi) * fnorm(M.S_psi) / len(H))
    return seed, n_real, len(E) - n_real, bool(r <= tol.chain * scale)


def _sweep_job(args):
    return sweep_row(*args)


def cmd_sweep(cfg):
    """One row per seed of a disordered model, in seed order."""
    spec = _need_model(cfg)
    if "seed" not in spec.resolved():
        raise ConfigError(f"{spec.family} has no seed parameter to sweep")
    if cfg.seeds is None:
        raise ConfigError("sweep needs --seeds A:B")
    lo, hi = cfg.seeds
    jobs = [(spec, s, cfg.tol) for s in range(lo, hi + 1)]
    if cfg.jobs and cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(_sweep_job, jobs))
    else:
        rows = [_sweep_job(j) for j in jobs]
    if cfg.format == "csv":
        text = _csv(
            ["seed", "n_real", "n_complex", "pseudo_hermitian"],
            [[s, r, c, str(p).lower()] for s, r, c, p in rows],
        )
    else:
        text = _json(
            {
                "model": spec.to_dict(),
                "rows": [
                    {"seed": s, "n_real": r, "n_complex": c, "pseudo_hermitian": p}
                    for s, r, c, p in rows
                ],
            }
        )
    _write(cfg, text)
    frac = sum(1 for _, _, c, _ in rows if c == 0) / len(rows)
    print(f"all-real fraction: {frac:.4g} ({len(rows)} seeds)", file=sys.stderr)
    return EXIT_OK


_HANDLERS = {
    "spectrum": cmd_spectrum,
    "chain": cmd_chain,
    "verify": cmd_verify,
    "heatmap": cmd_heatmap,
    "sweep": cmd_sweep,
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="metricchain",
        description="Metric operators and isospectral Hamiltonian chains for non-Hermitian models.",
        epilog="exit codes: 0 ok, 1 verification failed, 2 invalid config, 3 numerical failure",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name, help=(_HANDLERS[name].__doc__ or name).strip().splitlines()[0])
        s.add_argument("--config", help="JSON run configuration")
        s.add_argument("--family", help="model family")
        s.add_argument("--param", action="append", metavar="K=V", help="model parameter (repeatable)")
        s.add_argument("--depth", type=int, help=f"chain depth 0..{MAX_DEPTH}")
        s.add_argument("--tol", action="append", metavar="K=V", help="tolerance override (repeatable)")
        s.add_argument("--output", "-o", help="output file (default: stdout)")
        s.add_argument("--format", choices=("csv", "json"))
        if name in ("verify", "heatmap"):
            s.add_argument("--tree", help="previously written chain JSON instead of a model")
        if name == "heatmap":
            s.add_argument("--node", help="node label, e.g. flat0 or Hdag_sharp1")
        if name == "sweep":
            s.add_argument("--seeds", metavar="A:B", help="inclusive seed range")
            s.add_argument("--jobs", type=int, help="worker processes")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return _HANDLERS[args.command](cfg)
    except (ConfigError, InvalidSpec, UnknownNodeLabel) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except MetricChainError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
