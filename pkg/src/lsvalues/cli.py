"""Command-line interface.

Commands
--------
value      Per-player value of a game: shapley, banzhaf, or lsq.
approx     Weighted least-squares approximation with a configurable
           subspace and constraints.
check-pd   Report whether a weight scheme induces a positive definite form.
transform  Game transforms: mobius coefficients or the dual game.
verify     Cross-run closed forms, the generic solver and enumeration
           oracles; nonzero exit if any identity fails its tolerance.

Exit codes: 0 success, 1 usage error, 2 input or file error, 3 numerical
failure (weights that are not positive definite, inconsistent constraints,
or a failed verification identity).

Numbers are printed with 12 significant digits; values within 1e-12 of
zero relative to the result scale print as 0.
"""

import argparse
import json
import sys

import numpy as np

from .approx import (
    DiagonalWeights,
    MatrixWeights,
    SizeWeights,
    build_gram,
    efficiency_constraint,
    kadditive_subspace,
    solve_approximation,
    sum_preservation_constraint,
)
from .compound import charnes_weights, pd_spectral, uniform_pq
from .errors import ComputationError, GameFormatError, NotPositiveDefiniteError
from .games import coalition_label, coalition_size, dual_game, mobius_transform
from .gamefile import (
    parse_diagonal_weights,
    parse_game,
    parse_weight_matrix,
    serialize_table,
)
from .linalg import cholesky_factor
from .prob import banzhaf_distribution, probabilistic_value, shapley_distribution
from .verify import run_checks


class UsageError(Exception):
    """Bad flag combination or option value discovered after parsing."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def format_number(x, scale=1.0):
    """12-significant-digit text; near-zeros (relative to scale) print as 0."""
    x = float(x)
    if abs(x) < 1e-12 * max(1.0, scale):
        x = 0.0
    text = f"{x:.12g}"
    return "0" if text == "-0" else text


def _print_values(values):
    scale = float(np.max(np.abs(values))) if len(values) else 1.0
    for i, x in enumerate(values, start=1):
        print(f"player {i}: {format_number(x, scale)}")


def _json_values(n, method, values, extra=None):
    scale = float(np.max(np.abs(values))) if len(values) else 1.0
    payload = {
        "players": n,
        "method": method,
        "value": [float(format_number(x, scale)) for x in values],
    }
    if extra:
        payload.update(extra)
    print(json.dumps(payload))


def _load_game(path):
    with open(path, "r", encoding="utf-8") as handle:
        return parse_game(handle.read())


def _parse_weight_spec(spec):
    """Split a --weights value into (kind, payload); raises UsageError."""
    if spec == "charnes":
        return "charnes", None
    if spec.startswith("uniform:"):
        body = spec[len("uniform:") :]
        try:
            alpha = [float(tok) for tok in body.split(",")]
        except ValueError:
            raise UsageError(f"malformed uniform weights {body!r}") from None
        if not alpha:
            raise UsageError("uniform weights need at least one entry")
        return "uniform", alpha
    if spec.startswith("diagonal:@"):
        return "diagonal", spec[len("diagonal:@") :]
    if spec.startswith("matrix:@"):
        return "matrix", spec[len("matrix:@") :]
    raise UsageError(
        f"unknown weight spec {spec!r}; expected charnes, uniform:a1,...,an, "
        "diagonal:@file or matrix:@file"
    )


def _resolve_weights(spec, n):
    """WeightScheme for a --weights value, given the player count."""
    kind, payload = _parse_weight_spec(spec)
    if kind == "charnes":
        return charnes_weights(n)
    if kind == "uniform":
        if len(payload) != n:
            raise UsageError(
                f"uniform weights need {n} entries for this game, got {len(payload)}"
            )
        return SizeWeights(payload)
    with open(payload, "r", encoding="utf-8") as handle:
        text = handle.read()
    if kind == "diagonal":
        file_n, table = parse_diagonal_weights(text)
        if file_n != n:
            raise GameFormatError(
                f"weight file is for n={file_n} players, game has n={n}"
            )
        return DiagonalWeights(table)
    file_n, W = parse_weight_matrix(text)
    if file_n != n:
        raise GameFormatError(f"weight matrix is for n={file_n} players, game has n={n}")
    return MatrixWeights(W)


def _resolve_constraints(args, basis, default_efficiency):
    explicit = args.efficiency or args.sum_preserving or args.unconstrained
    if args.unconstrained and (args.efficiency or args.sum_preserving):
        raise UsageError("--unconstrained conflicts with the other constraint flags")
    constraints = []
    if args.efficiency or (default_efficiency and not explicit):
        constraints.append(efficiency_constraint(basis))
    if args.sum_preserving:
        constraints.append(sum_preservation_constraint(basis))
    return constraints


def _add_constraint_flags(parser):
    parser.add_argument("--efficiency", action="store_true",
                        help="require the per-player values to sum to v(N) (default for lsq)")
    parser.add_argument("--sum-preserving", action="store_true",
                        help="require the approximation to keep the total over all coalitions")
    parser.add_argument("--unconstrained", action="store_true",
                        help="drop the default efficiency constraint")


def build_parser():
    parser = _Parser(prog="lsvalues",
                     description="Least-squares and probabilistic values of TU games.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("value", parents=[], help="per-player value of a game")
    p.add_argument("game", help="game file (JSON)")
    p.add_argument("--method", choices=["shapley", "banzhaf", "lsq"], default="shapley")
    p.add_argument("--weights", default=None,
                   help="lsq weights: charnes | uniform:a1,...,an | diagonal:@file | matrix:@file")
    p.add_argument("--k-additive", type=int, default=1, dest="k_additive",
                   help="degree of the approximating subspace (lsq; default 1)")
    _add_constraint_flags(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("--tol", type=float, default=None,
                   help="absolute pivot tolerance override for the solver")

    p = sub.add_parser("approx", help="weighted least-squares approximation")
    p.add_argument("game")
    p.add_argument("--weights", default="charnes",
                   help="charnes | uniform:a1,...,an | diagonal:@file | matrix:@file")
    p.add_argument("--k-additive", type=int, default=1, dest="k_additive")
    _add_constraint_flags(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("check-pd", help="positive-definiteness of a weight scheme")
    p.add_argument("--weights", required=True)
    p.add_argument("--n", type=int, default=None, help="player count")
    p.add_argument("--k-additive", type=int, default=1, dest="k_additive")
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("transform", help="game transforms")
    p.add_argument("kind", choices=["mobius", "dual"])
    p.add_argument("game")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("verify", help="cross-check independent computation routes")
    p.add_argument("game")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--weights", default=None,
                   help="also report the PD gate for this custom weight scheme")

    return parser


def _cmd_value(args):
    game = _load_game(args.game)
    lsq_flags = (args.weights is not None or args.k_additive != 1
                 or args.efficiency or args.sum_preserving or args.unconstrained)
    if args.method != "lsq":
        if lsq_flags:
            raise UsageError("--weights, --k-additive and constraint flags apply only to --method lsq")
        profile = (shapley_distribution if args.method == "shapley" else banzhaf_distribution)
        values = probabilistic_value(game, profile(game.n))
    else:
        weights = _resolve_weights(args.weights or "charnes", game.n)
        basis = kadditive_subspace(game.n, args.k_additive)
        constraints = _resolve_constraints(args, basis, default_efficiency=True)
        result = solve_approximation(game, weights, basis, constraints,
                                     pivot_tol=args.tol)
        values = result.value
    if args.json:
        _json_values(game.n, args.method, values)
    else:
        _print_values(values)
    return 0


def _cmd_approx(args):
    game = _load_game(args.game)
    weights = _resolve_weights(args.weights, game.n)
    basis = kadditive_subspace(game.n, args.k_additive)
    constraints = _resolve_constraints(args, basis, default_efficiency=True)
    result = solve_approximation(game, weights, basis, constraints, pivot_tol=args.tol)
    if args.json:
        scale = float(np.max(np.abs(result.coefficients))) or 1.0
        _json_values(game.n, "approx", result.value, extra={
            "coefficients": [float(format_number(x, scale)) for x in result.coefficients],
        })
    else:
        _print_values(result.value)
    return 0


def _cmd_check_pd(args):
    kind, payload = _parse_weight_spec(args.weights)
    if kind in ("charnes", "uniform"):
        n = args.n if args.n is not None else (len(payload) if kind == "uniform" else None)
        if n is None:
            raise UsageError("--n is required for these weights")
        weights = _resolve_weights(args.weights, n)
    else:
        with open(payload, "r", encoding="utf-8") as handle:
            text = handle.read()
        if kind == "diagonal":
            n, table = parse_diagonal_weights(text)
            weights = DiagonalWeights(table)
        else:
            n, W = parse_weight_matrix(text)
            weights = MatrixWeights(W)
        if args.n is not None and args.n != n:
            raise GameFormatError(f"weight file is for n={n} players, --n says {args.n}")
    if isinstance(weights, SizeWeights) and args.k_additive == 1:
        form = uniform_pq(weights)
        verdict = "true" if pd_spectral(form) else "false"
        print(f"PD: {verdict} (p={format_number(form.p)}, q={format_number(form.q)})")
        return 0
    gram = build_gram(weights, kadditive_subspace(n, args.k_additive))
    try:
        cholesky_factor(gram, pivot_tol=args.tol)
    except NotPositiveDefiniteError as exc:
        print(f"PD: false (pivot {exc.pivot_index})")
        return 0
    print("PD: true")
    return 0


def _cmd_transform(args):
    game = _load_game(args.game)
    if args.kind == "mobius":
        table = mobius_transform(game)
    else:
        table = dual_game(game).table
    if args.json:
        sys.stdout.write(serialize_table(game.n, table))
        return 0
    scale = float(np.max(np.abs(table))) if table.size else 1.0
    masks = sorted(range(1, (1 << game.n)), key=lambda m: (coalition_size(m), m))
    for mask in masks:
        print(f"{coalition_label(mask)}: {format_number(table[mask - 1], scale)}")
    return 0


def _cmd_verify(args):
    game = _load_game(args.game)
    weights = _resolve_weights(args.weights, game.n) if args.weights else None
    results = run_checks(game, trials=args.trials, tol=args.tol,
                         seed=args.seed, weights=weights)
    failed = []
    for r in results:
        status = "ok" if r.passed else "FAIL"
        suffix = f" - {r.detail}" if r.detail else ""
        print(f"{r.name}: {status} (max dev {r.max_deviation:.3g}, tol {r.tolerance:g}){suffix}")
        if not r.passed:
            failed.append(r.name)
    if failed:
        print(f"verify: FAILED ({', '.join(failed)})")
        return 3
    print("verify: all checks passed")
    return 0


_COMMANDS = {
    "value": _cmd_value,
    "approx": _cmd_approx,
    "check-pd": _cmd_check_pd,
    "transform": _cmd_transform,
    "verify": _cmd_verify,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 0
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"lsvalues: error: {exc}\n")
        return 1
    except (GameFormatError, OSError, ValueError) as exc:
        sys.stderr.write(f"lsvalues: input error: {exc}\n")
        return 2
    except ComputationError as exc:
        sys.stderr.write(f"lsvalues: numerical failure: {exc}\n")
        return 3


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
