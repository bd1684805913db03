"""Command-line interface.

Subcommands: ``fit``, ``curves``, ``inequality``, ``sample``, ``compare``
and ``mixture-fit``. Tables go to stdout (or ``--output``) as
comma-separated values with a header row and LF line endings; numbers are
printed with 10 significant digits.

Exit codes: 0 success, 1 input or validation error, 2 numerical
non-convergence.

Settings may also come from an INI file given with ``--config``; keys are
the long flag names (dashes or underscores) in a ``[kappagen]`` section.
Command-line flags override the file, which overrides built-in defaults.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import logging
import math
import sys

import numpy as np

from .data import WeightedSample
from .distributions import MODELS, KappaGeneralized, Weibull
from .fitting import BootstrapError, DegenerateDataError, FitConfig, fit_mle
from .gof import DEFAULT_MODELS, compare, ks_statistic
from .inequality import gini, lorenz, mean, percentile_share, sample_gini, sample_lorenz
from .kappa_math import DomainError
from .mixture import NetWealthMixture, fit_mixture

EXIT_OK, EXIT_INPUT, EXIT_NONCONVERGED = 0, 1, 2

# which model parameter each of --alpha/--beta/--shape2 (and --kappa) sets
_PARAM_FLAGS = {
    "kgen": {"alpha": "alpha", "beta": "beta", "kappa": "kappa"},
    "weibull": {"alpha": "shape", "beta": "scale"},
    "exponential": {"beta": "scale"},
    "singh-maddala": {"alpha": "a", "beta": "b", "shape2": "q"},
    "dagum": {"alpha": "a", "beta": "b", "shape2": "p"},
}
_PARAM_DEFAULTS = {"alpha": 2.0, "beta": 1.2, "kappa": 0.75, "shape2": 1.0}

WEIGHT_COLUMN = "weight"
COMPARE_HEADER = ("rank", "model", "k", "loglik", "aic", "bic", "ks_statistic", "ks_top_decile", "converged")


class InputError(Exception):
    """Malformed input file or invalid option values."""


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return f"{float(v):.10g}"


def _write_rows(out, header, rows):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])


class _Output:
    """Collects tables and writes them to a file or stdout in one go."""

    def __init__(self, path):
        self.path = path
        self.buf = io.StringIO()

    def table(self, header, rows):
        if self.buf.tell():
            self.buf.write("\n")
        _write_rows(self.buf, header, rows)

    def flush(self):
        text = self.buf.getvalue()
        if self.path:
            with open(self.path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


# ---------------------------------------------------------------- input ---

def read_sample(path, weights_column=None):
    """Read a ``value[,weight]`` CSV file.

    Returns the values, weights, the name of the weight column used (None
    for equal weights) and the file line number of every record.
    """
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file, header row required") from None
        header = [h.strip() for h in header]
        if "value" not in header:
            raise InputError(f"{path}: line 1: header has no 'value' column")
        vcol = header.index("value")
        if weights_column is not None:
            if weights_column not in header:
                raise InputError(f"{path}: line 1: weight column {weights_column!r} not found")
            wcol = header.index(weights_column)
        elif WEIGHT_COLUMN in header:
            weights_column, wcol = WEIGHT_COLUMN, header.index(WEIGHT_COLUMN)
        else:
            wcol = None
        values, weights, lines = [], [], []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise InputError(f"{path}: line {line}: expected {len(header)} fields, got {len(row)}")
            values.append(_number(row[vcol], path, line, "value"))
            if wcol is not None:
                w = _number(row[wcol], path, line, "weight")
                if w < 0:
                    raise InputError(f"{path}: line {line}: negative weight {row[wcol]!r}")
                weights.append(w)
            lines.append(line)
    if not values:
        raise InputError(f"{path}: no data rows")
    w = np.asarray(weights) if wcol is not None else np.ones(len(values))
    if not w.sum() > 0:
        raise InputError(f"{path}: total weight is zero")
    return np.asarray(values), w, weights_column, np.asarray(lines)


def _number(text, path, line, what):
    try:
        v = float(text.strip())
    except ValueError:
        raise InputError(f"{path}: line {line}: {what} {text!r} is not a number") from None
    if not math.isfinite(v):
        raise InputError(f"{path}: line {line}: {what} {text!r} is not finite")
    return v


def _load_positive(args):
    """Read the input file for a positive-support model; returns (sample, report rows)."""
    values, weights, wname, lines = read_sample(args.input, args.weights)
    report = [("weights", wname if wname else "equal (no weight column)")]
    bad = ~(values > 0)
    if np.any(bad):
        if not args.drop_nonpositive:
            i = int(np.flatnonzero(bad)[0])
            raise InputError(
                f"{args.input}: line {lines[i]}: nonpositive value {values[i]!r} "
                "(income models need x > 0; use --drop-nonpositive to drop such rows)"
            )
        report += [
            ("dropped_records", int(bad.sum())),
            ("dropped_weight_share", float(weights[bad].sum() / weights.sum())),
        ]
        values, weights = values[~bad], weights[~bad]
        if values.size == 0:
            raise InputError(f"{args.input}: no positive values left after dropping")
    return WeightedSample(values, weights), report


def _fit_config(args):
    return FitConfig(
        max_iterations=args.max_iterations,
        bootstrap_replicates=args.bootstrap,
        seed=args.seed,
    )


def _model_from_flags(args, model=None):
    model = model or args.model
    mapping = _PARAM_FLAGS[model]
    cls = MODELS[model]
    values = {mapping[flag]: getattr(args, flag) for flag in mapping}
    return cls(**{name: values[name] for name in cls.param_names})


# ------------------------------------------------------------- commands ---

def cmd_fit(args, out):
    data, report = _load_positive(args)
    res = fit_mle(data, args.model, _fit_config(args))
    rows = [("model", res.model), ("n_records", len(data))] + report
    rows += [(name, value) for name, value in res.params.params.items()]
    if res.stderr:
        rows += [(f"stderr_{name}", value) for name, value in res.stderr.items()]
    rows += [
        ("loglik", res.loglik),
        ("k", res.k),
        ("n_eff", res.n_eff),
        ("aic", res.aic),
        ("bic", res.bic),
        ("ks_statistic", ks_statistic(data, res.params)),
        ("ks_note", "no p-value: parameters were estimated from the same data"),
        ("converged", res.converged),
        ("iterations", res.iterations),
    ]
    out.table(("field", "value"), rows)
    return EXIT_OK if res.converged else EXIT_NONCONVERGED


def parse_sweep(spec, model):
    """Parse ``NAME=v1,v2,...`` into (flag name, list of floats)."""
    name, sep, rest = spec.partition("=")
    name = name.strip()
    if not sep or not rest.strip():
        raise InputError(f"invalid sweep {spec!r}; expected NAME=v1,v2,...")
    if name not in _PARAM_FLAGS[model]:
        raise InputError(f"cannot sweep {name!r} for model {model}; choose from {sorted(_PARAM_FLAGS[model])}")
    try:
        values = [float(v) for v in rest.split(",")]
    except ValueError:
        raise InputError(f"invalid sweep values in {spec!r}") from None
    if len(set(values)) != len(values):
        raise InputError(f"duplicate values in sweep {spec!r}")
    return name, values


def curve_table(model, dists, labels, grid, xmin, xmax):
    """Log-spaced x grid with one PDF and one CCDF column per distribution."""
    x = np.logspace(math.log10(xmin), math.log10(xmax), grid)
    header = ["x"] + [f"pdf{l}" for l in labels] + [f"ccdf{l}" for l in labels]
    cols = [d.pdf(x) for d in dists] + [d.ccdf(x) for d in dists]
    return header, np.column_stack([x] + cols)


def cmd_curves(args, out):
    if args.grid < 2:
        raise InputError("--grid must be at least 2")
    lo = hi = args.beta
    if args.sweep:
        name, values = parse_sweep(args.sweep, args.model)
        if name == "beta":
            lo, hi = min(values), max(values)
        dists, labels = [], []
        for v in values:
            setattr(args, name, v)
            dists.append(_model_from_flags(args))
            labels.append(f"_{name}={fmt(v)}")
    else:
        dists, labels = [_model_from_flags(args)], [""]
    xmin = args.xmin if args.xmin is not None else 1e-2 * lo
    xmax = args.xmax if args.xmax is not None else 1e3 * hi
    if not (0 < xmin < xmax):
        raise InputError("need 0 < --xmin < --xmax")
    header, table = curve_table(args.model, dists, labels, args.grid, xmin, xmax)
    out.table(header, table)
    return EXIT_OK


def cmd_inequality(args, out):
    shares = ((0.9, 1.0, "top10_share"), (0.99, 1.0, "top1_share"), (0.0, 0.5, "bottom50_share"))
    if args.input:
        values, weights, wname, lines = read_sample(args.input, args.weights)
        if np.any(values < 0):
            i = int(np.flatnonzero(values < 0)[0])
            raise InputError(f"{args.input}: line {lines[i]}: negative value {values[i]!r}")
        data = WeightedSample(values, weights)
        if not data.mean > 0:
            raise InputError(f"{args.input}: weighted mean must be positive")
        rows = [
            ("mode", "empirical"),
            ("weights", wname if wname else "equal (no weight column)"),
            ("mean", data.mean),
            ("gini", sample_gini(data)),
        ]
        lor = lambda u: sample_lorenz(u, data)
        rows += [(label, float(lor(b) - lor(a))) for a, b, label in shares]
    else:
        dist = _model_from_flags(args)
        try:
            mu = mean(dist)
        except DomainError:
            raise InputError("mean does not exist for these parameters (kappa >= alpha)") from None
        rows = [("mode", "parametric"), ("model", dist.name)]
        rows += list(dist.params.items())
        rows += [("mean", mu), ("gini", gini(dist))]
        rows += [(label, percentile_share(a, b, dist)) for a, b, label in shares]
        lor = lambda u: lorenz(u, dist)
    out.table(("field", "value"), rows)
    if args.lorenz_grid is not None:
        if args.lorenz_grid < 1:
            raise InputError("--lorenz-grid must be at least 1")
        u = np.linspace(0.0, 1.0, args.lorenz_grid + 1)
        ell = np.asarray(lor(u), dtype=float)
        ell[0], ell[-1] = 0.0, 1.0
        out.table(("u", "lorenz"), zip(u, ell))
    return EXIT_OK


def _mixture_from_flags(args):
    try:
        thetas = [float(t) for t in args.theta.split(",")]
    except ValueError:
        raise InputError(f"invalid --theta {args.theta!r}") from None
    if len(thetas) != 3:
        raise InputError("--theta needs three comma-separated weights NEG,ZERO,POS")
    neg = Weibull(args.neg_shape, args.neg_scale)
    pos = KappaGeneralized(args.alpha, args.beta, args.kappa)
    return NetWealthMixture(*thetas, neg, pos)


def cmd_sample(args, out):
    if args.n < 0:
        raise InputError("--n must be nonnegative")
    if args.model == "mixture":
        dist = _mixture_from_flags(args)
    else:
        dist = _model_from_flags(args)
    draws = dist.sample(args.n, args.seed)
    out.table(("value",), ((v,) for v in draws))
    return EXIT_OK


def cmd_compare(args, out):
    data, _ = _load_positive(args)
    models = [m.strip() for m in args.models.split(",") if m.strip()]
    unknown = [m for m in models if m not in MODELS]
    if unknown:
        raise InputError(f"unknown models {unknown}; choose from {sorted(MODELS)}")
    rows = compare(data, models, _fit_config(args))
    out.table(
        COMPARE_HEADER,
        ((r.rank, r.model, r.k, r.loglik, r.aic, r.bic, r.ks_statistic, r.ks_top_decile, r.converged) for r in rows),
    )
    return EXIT_OK if all(r.converged for r in rows) else EXIT_NONCONVERGED


def cmd_mixture_fit(args, out):
    values, weights, wname, _ = read_sample(args.input, args.weights)
    data = WeightedSample(values, weights)
    res = fit_mixture(data, _fit_config(args), args.zero_tol)
    m = res.params
    rows = [
        ("model", "mixture"),
        ("n_records", len(data)),
        ("weights", wname if wname else "equal (no weight column)"),
        ("theta_neg", m.theta_neg),
        ("theta_zero", m.theta_zero),
        ("theta_pos", m.theta_pos),
    ]
    if m.neg is not None:
        rows += [("neg_shape", m.neg.shape), ("neg_scale", m.neg.scale)]
    rows += [("pos_alpha", m.pos.alpha), ("pos_beta", m.pos.beta), ("pos_kappa", m.pos.kappa)]
    if res.stderr:
        rows += [(f"stderr_{k.replace('.', '_')}", v) for k, v in res.stderr.items()]
    rows += [
        ("loglik", res.loglik),
        ("k", res.k),
        ("n_eff", res.n_eff),
        ("aic", res.aic),
        ("bic", res.bic),
        ("converged", res.converged),
        ("iterations", res.iterations),
    ]
    out.table(("field", "value"), rows)
    return EXIT_OK if res.converged else EXIT_NONCONVERGED


# --------------------------------------------------------------- parser ---

_BOOL_KEYS = {"drop_nonpositive"}


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors (exit 1); argparse would exit with 2
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="kappagen",
        description="Kappa-generalized income and wealth distributions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", metavar="PATH", help="INI file with a [kappagen] section")
        p.add_argument("--output", metavar="PATH", help="write the table here instead of stdout")
        return p

    def params(p, models):
        p.add_argument("--model", choices=models, default="kgen")
        for flag, default in _PARAM_DEFAULTS.items():
            p.add_argument(f"--{flag}", type=float, default=default)

    def data_input(p):
        p.add_argument("input", metavar="INPUT", help="CSV file with columns value[,weight]")
        p.add_argument("--weights", metavar="COLUMN", help="name of the weight column")

    def fit_flags(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--bootstrap", type=int, default=0, metavar="N", help="bootstrap replicates (0 = off, else >= 50)")
        p.add_argument("--max-iterations", type=int, default=5000)

    model_names = list(MODELS)

    p = common(sub.add_parser("fit", help="maximum-likelihood fit of one model"))
    data_input(p)
    p.add_argument("--model", choices=model_names, default="kgen")
    p.add_argument("--drop-nonpositive", action="store_true")
    fit_flags(p)
    p.set_defaults(func=cmd_fit)

    p = common(sub.add_parser("curves", help="PDF and CCDF tables on a log-spaced grid"))
    params(p, model_names)
    p.add_argument("--sweep", metavar="NAME=v1,v2,...")
    p.add_argument("--grid", type=int, default=200, metavar="N")
    p.add_argument("--xmin", type=float)
    p.add_argument("--xmax", type=float)
    p.set_defaults(func=cmd_curves)

    p = common(sub.add_parser("inequality", help="mean, Gini, shares and Lorenz curve"))
    p.add_argument("input", nargs="?", metavar="INPUT", help="CSV file; omit for parametric mode")
    p.add_argument("--weights", metavar="COLUMN")
    params(p, model_names)
    p.add_argument("--lorenz-grid", type=int, metavar="N")
    p.set_defaults(func=cmd_inequality)

    p = common(sub.add_parser("sample", help="draw a synthetic sample"))
    params(p, model_names + ["mixture"])
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--theta", default="0,0,1", metavar="NEG,ZERO,POS")
    p.add_argument("--neg-shape", type=float, default=1.0)
    p.add_argument("--neg-scale", type=float, default=1.0)
    p.set_defaults(func=cmd_sample)

    p = common(sub.add_parser("compare", help="fit several models and rank them by AIC"))
    data_input(p)
    p.add_argument("--models", default=",".join(DEFAULT_MODELS))
    p.add_argument("--drop-nonpositive", action="store_true")
    fit_flags(p)
    p.set_defaults(func=cmd_compare)

    p = common(sub.add_parser("mixture-fit", help="three-component net-wealth mixture fit"))
    data_input(p)
    p.add_argument("--zero-tol", type=float, help="absolute zero threshold (default 1e-9 * median |x|)")
    fit_flags(p)
    p.set_defaults(func=cmd_mixture_fit)

    parser._subparsers_by_name = sub.choices
    return parser


def _apply_config(parser, argv):
    """Re-parse with defaults taken from the ``--config`` file."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    cp = configparser.ConfigParser()
    try:
        with open(args.config, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise InputError(f"cannot read config {args.config}: {exc}") from None
    if not cp.has_section("kappagen"):
        raise InputError(f"{args.config}: missing [kappagen] section")
    sub = parser._subparsers_by_name[args.command]
    known = {a.dest for a in sub._actions}
    defaults = {}
    for key, value in cp.items("kappagen"):
        dest = key.replace("-", "_")
        if dest not in known or dest in ("config", "input", "help"):
            raise InputError(f"{args.config}: unknown key {key!r} for '{args.command}'")
        if dest in _BOOL_KEYS:
            defaults[dest] = cp.getboolean("kappagen", key)
        else:
            defaults[dest] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.ERROR, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        out = _Output(args.output)
        code = args.func(args, out)
        out.flush()
        return code
    except BootstrapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except (InputError, DomainError, DegenerateDataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
