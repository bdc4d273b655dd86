"""Command-line interface.

Verbs: ``analytic`` (closed-form values as name,value CSV lines),
``estimate`` (one estimator run as a CSV row), ``simulate`` (the grid
experiment as CSV), ``figure`` (grid CSV plus an SVG chart), and
``selftest`` (the analytic-vs-Monte-Carlo acceptance suite).

Exit codes: 0 success, 2 usage error, 3 capability error, 4 acceptance
failure.
"""

from __future__ import annotations

import argparse
import sys

from . import analytics as an
from .copulas import parse_copula
from .distributions import parse_distribution, shifted
from .errors import CapabilityError, ContractError, RankvarError
from .estimation import (confidence_interval, estimate_kappa, estimate_tau,
                         estimate_tau_overlap, estimate_optimal_shift)
from .figures import write_figure
from .selftest import DEFAULT_SEED, run_selftest
from .simulation import SimulationConfig, records_to_csv, run_grid

USAGE_ERROR = 2
CAPABILITY_ERROR = 3
ACCEPTANCE_FAILURE = 4


def _emit(name: str, value) -> None:
    if isinstance(value, float):
        print(f"{name},{value:.12g}")
    else:
        print(f"{name},{value}")


def _parse_weights(text: str):
    from .copulas import FrechetWeights
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 3:
        raise ContractError("--w expects three comma-separated weights")
    return FrechetWeights(*parts)


def _discrete_spec(text: str):
    dist, _ = parse_distribution(text)
    if not dist.name.startswith("discrete:"):
        raise ContractError("--dist must be a discrete:<m>:<z>:<p> spec here")
    from .distributions import DiscreteSymmetricSpec
    _, m_txt, z_txt, p_txt = text.split(":")
    return DiscreteSymmetricSpec(m=int(m_txt),
                                 z=tuple(float(x) for x in z_txt.split(",")),
                                 p=tuple(float(x) for x in p_txt.split(",")))


def _cmd_analytic(args: argparse.Namespace) -> int:
    q = args.quantity
    if q == "var-x2":
        dist, _ = parse_distribution(args.dist)
        _emit(q, dist.var_x_squared)
    elif q == "fourth-moment":
        dist, _ = parse_distribution(args.dist)
        _emit(q, dist.fourth_moment)
    elif q == "sigma2-frechet":
        dist, _ = parse_distribution(args.dist)
        _emit(q, an.sigma2_frechet(dist, _parse_weights(args.w)))
    elif q == "kappa-frechet":
        _emit(q, an.kappa_frechet(_parse_weights(args.w)))
    elif q == "tau-frechet":
        _emit(q, an.tau_frechet(_parse_weights(args.w)))
    elif q == "envelope-frechet":
        dist, _ = parse_distribution(args.dist)
        env = an.envelope_frechet(dist)
        _emit("envelope-best", env.best)
        _emit("envelope-worst", env.worst)
        _emit("envelope-best-attainers",
              ";".join(sorted(t.value for t in env.best_attainers)))
        _emit("envelope-worst-attainers",
              ";".join(sorted(t.value for t in env.worst_attainers)))
    elif q == "prefer":
        first, _ = parse_distribution(args.dist)
        second, _ = parse_distribution(args.dist2)
        _emit(q, an.prefer(first, second).value)
    elif q == "sigma2-beta":
        _emit(q, an.sigma2_beta(parse_copula(args.copula)))
    elif q == "beta":
        _emit(q, an.beta_closed_form(parse_copula(args.copula)))
    elif q == "tau":
        _emit(q, an.tau_closed_form(parse_copula(args.copula)))
    elif q == "sigma2-tau":
        if args.tau is not None:
            _emit(q, an.sigma2_tau_analytic(args.tau))
        else:
            _emit(q, an.sigma2_tau_analytic(
                an.tau_closed_form(parse_copula(args.copula))))
    elif q == "beta-clayton":
        _emit(q, an.beta_clayton(args.theta))
    elif q == "sigma2-nvm":
        if args.var_x2 is not None:
            _emit(q, an.sigma2_nvm_from_var_x2(args.var_x2, args.rho))
        else:
            _emit(q, an.sigma2_nvm(an.MixtureMoments(args.e_w, args.e_w2),
                                   args.rho))
    elif q == "optimal-shift":
        _emit(q, an.optimal_shift_analytic(args.cov, args.var))
    elif q == "kappa-discrete":
        _emit(q, an.kappa_discrete(_discrete_spec(args.dist),
                                   parse_copula(args.copula)))
    elif q == "sigma2-discrete":
        _emit(q, an.sigma2_discrete(_discrete_spec(args.dist),
                                    parse_copula(args.copula)))
    elif q == "squared-copula":
        _emit(q, an.squared_copula(parse_copula(args.copula), args.u, args.v))
    elif q == "p-balance":
        _emit(q, parse_copula(args.copula).p_balance())
    elif q == "cdf":
        _emit(q, parse_copula(args.copula).cdf(args.u, args.v))
    else:  # pragma: no cover - argparse restricts choices
        raise ContractError(f"unknown quantity {q!r}")
    return 0


def _cmd_estimate(args: argparse.Namespace) -> int:
    copula = parse_copula(args.copula)
    if args.estimator == "kappa":
        dist, want_opt = parse_distribution(args.dist)
        want_opt = want_opt or args.shift == "opt"
        pairs = copula.sample(args.n, args.seed)
        if want_opt:
            if dist.is_shifted:
                raise ContractError("cannot combine a fixed and optimal shift")
            dist = shifted(dist, estimate_optimal_shift(dist, pairs))
        result = estimate_kappa(dist, pairs, seed=args.seed)
    elif args.estimator == "tau":
        pairs = copula.sample(2 * args.n, args.seed)
        result = estimate_tau(pairs[:args.n], pairs[args.n:], seed=args.seed)
    else:  # tau-overlap
        pairs = copula.sample(args.n + 1, args.seed)
        result = estimate_tau_overlap(pairs, seed=args.seed)
    print("estimator,estimate,sigma2_hat,n,seed")
    print(f"{result.estimator_id},{result.estimate:.12g},"
          f"{result.sigma2_hat:.12g},{result.n},{result.seed}")
    if args.level is not None:
        lo, hi = confidence_interval(result, args.level)
        print(f"ci{args.level:g},{lo:.12g},{hi:.12g}")
    return 0


def _config_from_args(args: argparse.Namespace) -> SimulationConfig:
    return SimulationConfig(
        grid_points=args.grid_points,
        n=args.n,
        nu_t_copula=args.nu,
        base_seed=args.seed,
        distributions=tuple(args.dists.split(",")),
        copula_families=tuple(args.families.split(",")),
        include_shift=not args.no_shift,
        include_tau=not args.no_tau,
    )


def _cmd_simulate(args: argparse.Namespace) -> int:
    csv_text = records_to_csv(run_grid(_config_from_args(args)))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    return 0


def _cmd_figure(args: argparse.Namespace) -> int:
    records = run_grid(_config_from_args(args))
    with open(args.out + ".csv", "w") as fh:
        fh.write(records_to_csv(records))
    write_figure(records, args.out + ".svg")
    print(f"wrote {args.out}.csv and {args.out}.svg")
    return 0


def _cmd_selftest(args: argparse.Namespace) -> int:
    results = run_selftest(seed=args.seed, only=args.only)
    failures = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        failures += not res.passed
        print(f"{status} criterion {res.index:2d}: {res.name} -- {res.detail}")
    if failures:
        print(f"{failures} criterion(s) failed", file=sys.stderr)
        return ACCEPTANCE_FAILURE
    print(f"all {len(results)} criteria passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankvar",
        description="Transformed rank correlations and the asymptotic "
                    "variances of their canonical estimators.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p_an = sub.add_parser("analytic", help="print closed-form values")
    p_an.add_argument("quantity", choices=[
        "var-x2", "fourth-moment", "sigma2-frechet", "kappa-frechet",
        "tau-frechet", "envelope-frechet", "prefer", "sigma2-beta", "beta",
        "tau", "sigma2-tau", "beta-clayton", "sigma2-nvm", "optimal-shift",
        "kappa-discrete", "sigma2-discrete", "squared-copula", "p-balance",
        "cdf"])
    p_an.add_argument("--dist", help="distribution spec")
    p_an.add_argument("--dist2", help="second distribution spec (prefer)")
    p_an.add_argument("--copula", help="copula spec")
    p_an.add_argument("--w", help="Frechet weights pM,pPi,pW")
    p_an.add_argument("--theta", type=float, help="Clayton parameter")
    p_an.add_argument("--rho", type=float, help="correlation parameter")
    p_an.add_argument("--tau", type=float, help="Kendall tau value")
    p_an.add_argument("--e-w", dest="e_w", type=float, help="E[W] of the mixer")
    p_an.add_argument("--e-w2", dest="e_w2", type=float, help="E[W^2] of the mixer")
    p_an.add_argument("--var-x2", dest="var_x2", type=float,
                      help="Var(X^2) form of the mixture variance")
    p_an.add_argument("--cov", type=float, help="Cov(XY, X+Y)")
    p_an.add_argument("--var", type=float, help="Var(X+Y)")
    p_an.add_argument("--u", type=float, help="first coordinate")
    p_an.add_argument("--v", type=float, help="second coordinate")
    p_an.set_defaults(func=_cmd_analytic)

    p_est = sub.add_parser("estimate", help="run one estimator on fresh samples")
    p_est.add_argument("--copula", required=True)
    p_est.add_argument("--dist", help="distribution spec (kappa estimator)")
    p_est.add_argument("--n", type=int, required=True,
                       help="number of estimator products")
    p_est.add_argument("--seed", type=int, required=True)
    p_est.add_argument("--estimator", choices=["kappa", "tau", "tau-overlap"],
                       default="kappa")
    p_est.add_argument("--shift", choices=["opt"],
                       help="apply the plug-in optimal location shift")
    p_est.add_argument("--level", type=float,
                       help="also print a CLT confidence interval")
    p_est.set_defaults(func=_cmd_estimate)

    for name, helptext in (("simulate", "run the variance grid, emit CSV"),
                           ("figure", "run the grid, emit CSV and SVG")):
        p_sim = sub.add_parser(name, help=helptext)
        p_sim.add_argument("--grid-points", type=int, default=50)
        p_sim.add_argument("--n", type=int, default=100_000)
        p_sim.add_argument("--nu", type=float, default=5.0,
                           help="degrees of freedom of the t copula")
        p_sim.add_argument("--seed", type=int, default=42)
        p_sim.add_argument("--dists",
                           default="uniform,beta:0.5,normal,t:10,bernoulli")
        p_sim.add_argument("--families", default="gauss,t,clayton")
        p_sim.add_argument("--no-shift", action="store_true")
        p_sim.add_argument("--no-tau", action="store_true")
        if name == "simulate":
            p_sim.add_argument("--out", help="write CSV here instead of stdout")
            p_sim.set_defaults(func=_cmd_simulate)
        else:
            p_sim.add_argument("--out", required=True,
                               help="output path prefix (.csv and .svg)")
            p_sim.set_defaults(func=_cmd_figure)

    p_self = sub.add_parser("selftest", help="run the acceptance suite")
    p_self.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_self.add_argument("--only", type=int, help="run a single criterion")
    p_self.set_defaults(func=_cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapabilityError as exc:
        print(f"capability error: {exc}", file=sys.stderr)
        return CAPABILITY_ERROR
    except (ContractError, RankvarError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (TypeError, AttributeError) as exc:
        print(f"error: missing or malformed flags for this quantity ({exc})",
              file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
