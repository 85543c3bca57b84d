"""Command-line front end.

    legendre-pricing price    --model m.json --kind call --strike 1 --maturity 1 --N 64 --M 64
    legendre-pricing density  --model m.json --strike 1 --maturity 1 --N 32 --M 32 --true
    legendre-pricing converge --model m.json --kind digital_call --maturity 10 \\
        --N-list 8,16,32,64 --M-list 64 --strikes 0.8,1,1.2

Exit codes: 0 success, 1 malformed configuration, 2 numerical failure,
3 no reference available.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .errors import PricingError
from .expansion import compute_coefficients, density_csv, density_grid
from .models import MODEL_TYPES, BlackScholes, MarketParams, Merton, ModelSpec, truncation_range
from .oracles import merton_density, reference_price
from .pricing import KINDS, OptionContract, price

EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_NO_ORACLE = 3


class ConfigError(Exception):
    """Malformed command line or model file."""


class OracleUnavailable(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for numerical failures here.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    model_path: str
    kind: str
    strike: float | None
    maturity: float
    N: int
    M: int
    L: float | None
    tol: float
    fmt: str
    out: str | None


def load_model(path: str) -> tuple[ModelSpec, float, float]:
    """Read a model file; returns (model, spot, rate)."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read model file {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"model file {path} is not valid JSON: {exc}") from exc
    return model_from_dict(raw)


def model_from_dict(raw) -> tuple[ModelSpec, float, float]:
    if not isinstance(raw, dict):
        raise ConfigError("model file must hold a JSON object")
    raw = dict(raw)
    name = raw.pop("model", None)
    if name not in MODEL_TYPES:
        raise ConfigError(f"field 'model' must be one of {sorted(MODEL_TYPES)}, got {name!r}")
    cls = MODEL_TYPES[name]
    params = [f.name for f in dataclasses.fields(cls)]
    allowed = {"spot", "rate", *params}
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(f"unknown field(s) for {name}: {', '.join(unknown)}")
    missing = [k for k in ("spot", "rate", *params) if k not in raw]
    if missing:
        raise ConfigError(f"missing field(s) for {name}: {', '.join(missing)}")
    for key, val in raw.items():
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigError(f"field '{key}' must be a number, got {val!r}")
    try:
        model = cls(**{k: float(raw[k]) for k in params})
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return model, float(raw["spot"]), float(raw["rate"])


def _market(spot: float, rate: float, strike: float, maturity: float) -> MarketParams:
    try:
        return MarketParams(spot, rate, maturity, strike)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _contract(kind: str, strike: float, maturity: float) -> OptionContract:
    try:
        return OptionContract(kind, strike, maturity)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _fmt(v: float) -> str:
    v = float(v)
    return repr(v) if not math.isfinite(v) else f"{v:.17g}"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _require_strike(cfg: RunConfig) -> float:
    if cfg.strike is None:
        raise ConfigError("missing field 'strike' (--strike)")
    return cfg.strike


def _csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else _fmt(v) for v in row))
    return "\n".join(lines) + "\n"


# -- commands ------------------------------------------------------------------

def cmd_price(cfg: RunConfig, with_reference: bool = False) -> int:
    model, spot, rate = load_model(cfg.model_path)
    strike = _require_strike(cfg)
    market = _market(spot, rate, strike, cfg.maturity)
    contract = _contract(cfg.kind, strike, cfg.maturity)
    res = price(model, market, contract, cfg.N, cfg.M, cfg.L, tol=cfg.tol)
    record = {
        "model": model.name,
        "kind": res.kind,
        "strike": strike,
        "maturity": cfg.maturity,
        "N": res.n_terms,
        "M": res.fourier_terms,
        "a": res.range.a,
        "b": res.range.b,
        "price": res.price,
        "coeff_tail": res.coeff_tail,
    }
    if with_reference:
        ref = reference_price(model, market, contract)
        record.update(
            reference=ref.value,
            reference_method=ref.method,
            reference_est_error=ref.est_error,
            abs_error=abs(res.price - ref.value),
        )
    if cfg.fmt == "json":
        text = json.dumps(record, indent=2) + "\n"
    else:
        text = _csv(list(record), [list(record.values())])
    _emit(text, cfg.out)
    return 0


def cmd_density(cfg: RunConfig, n_points: int = 512, with_true: bool = False) -> int:
    model, spot, rate = load_model(cfg.model_path)
    strike = _require_strike(cfg)
    if n_points < 2:
        raise ConfigError(f"--n-points must be >= 2, got {n_points}")
    market = _market(spot, rate, strike, cfg.maturity)
    extra = {}
    if with_true and not isinstance(model, (BlackScholes, Merton)):
        raise OracleUnavailable(f"no analytic density for the {model.name} model")
    rng = truncation_range(model, market, cfg.L)
    exp = compute_coefficients(model, market, rng, cfg.N, cfg.M)
    y, f = density_grid(exp, n_points)
    if with_true:
        if isinstance(model, BlackScholes):
            mean = market.log_moneyness + (rate - 0.5 * model.sigma**2) * cfg.maturity
            sd = model.sigma * math.sqrt(cfg.maturity)
            extra["f_true"] = [math.exp(-0.5 * ((v - mean) / sd) ** 2) / (sd * math.sqrt(2 * math.pi)) for v in y]
        else:
            extra["f_true"] = merton_density(y, market, model)
    if cfg.fmt == "json":
        record = {"y": y.tolist(), "f": f.tolist()}
        record.update({k: [float(v) for v in col] for k, col in extra.items()})
        text = json.dumps(record) + "\n"
    else:
        text = density_csv(y, f, extra)
    _emit(text, cfg.out)
    return 0


def cmd_converge(
    cfg: RunConfig,
    N_list: list[int],
    M_list: list[int],
    strikes: list[float],
    jobs: int = 1,
) -> int:
    """Table of log10 |price - reference| over (K, N, M), in that nesting order."""
    model, spot, rate = load_model(cfg.model_path)
    if not N_list:
        raise ConfigError("--N-list is empty")
    if not M_list:
        raise ConfigError("--M-list is empty")
    if not strikes:
        raise ConfigError("no strikes given (--strikes or --strike)")
    if any(n < 1 for n in N_list) or any(m < 1 for m in M_list):
        raise ConfigError("N and M values must be >= 1")

    refs = {}
    for K in strikes:
        market = _market(spot, rate, K, cfg.maturity)
        refs[K] = reference_price(model, market, _contract(cfg.kind, K, cfg.maturity)).value
    cells = [(K, n, m) for K in strikes for n in N_list for m in M_list]

    def run(cell):
        K, n, m = cell
        market = _market(spot, rate, K, cfg.maturity)
        res = price(model, market, _contract(cfg.kind, K, cfg.maturity), n, m, cfg.L, tol=cfg.tol)
        return math.log10(max(abs(res.price - refs[K]), 1e-300))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            errs = list(pool.map(run, cells))  # map keeps input order
    else:
        errs = [run(c) for c in cells]

    rows = [[model.name, K, n, m, e] for (K, n, m), e in zip(cells, errs)]
    if cfg.fmt == "json":
        text = json.dumps(
            [dict(zip(("model", "K", "N", "M", "err"), r)) for r in rows], indent=2
        ) + "\n"
    else:
        text = _csv(["model", "K", "N", "M", "err"], [[r[0], r[1], str(r[2]), str(r[3]), r[4]] for r in rows])
    _emit(text, cfg.out)
    return 0


# -- argument parsing -----------------------------------------------------------

def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--model", required=True, help="model JSON file")
    common.add_argument("--kind", choices=KINDS, default="call")
    common.add_argument("--strike", type=float, help="strike K")
    common.add_argument("--maturity", type=float, required=True, help="maturity T in years")
    common.add_argument("--N", type=int, default=64, help="highest Legendre degree")
    common.add_argument("--M", type=int, default=64, help="number of Fourier terms")
    common.add_argument("--L", type=float, default=None, help="range multiplier (model default if omitted)")
    common.add_argument("--tol", type=float, default=1e-14, help="relative tolerance of the U_n solver")
    common.add_argument("--format", dest="fmt", choices=("csv", "json"), default="json")
    common.add_argument("--out", help="output file (stdout if omitted)")

    parser = _Parser(prog="legendre-pricing", description="Option pricing by Legendre-series density recovery.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("price", parents=[common], help="price one contract")
    p.add_argument("--reference", action="store_true", help="also run the matching oracle")

    d = sub.add_parser("density", parents=[common], help="recovered density on a grid")
    d.add_argument("--n-points", type=int, default=512)
    d.add_argument("--true", dest="with_true", action="store_true", help="add the analytic density (BS, Merton)")

    c = sub.add_parser("converge", parents=[common], help="log10 error sweep over N, M and strikes")
    c.add_argument("--N-list", type=_int_list, required=True)
    c.add_argument("--M-list", type=_int_list, default=None, help="defaults to --M")
    c.add_argument("--strikes", type=_float_list, default=None, help="defaults to --strike")
    c.add_argument("--jobs", type=int, default=1, help="worker threads; output order is fixed")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        model_path=args.model,
        kind=args.kind,
        strike=args.strike,
        maturity=args.maturity,
        N=args.N,
        M=args.M,
        L=args.L,
        tol=args.tol,
        fmt=args.fmt,
        out=args.out,
    )
    try:
        if cfg.N < 1 or cfg.M < 1:
            raise ConfigError("N and M must be >= 1")
        if args.command == "price":
            return cmd_price(cfg, with_reference=args.reference)
        if args.command == "density":
            return cmd_density(cfg, args.n_points, with_true=args.with_true)
        strikes = args.strikes if args.strikes is not None else ([cfg.strike] if cfg.strike else [])
        M_list = args.M_list if args.M_list is not None else [cfg.M]
        return cmd_converge(cfg, args.N_list, M_list, strikes, jobs=args.jobs)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OracleUnavailable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_ORACLE
    except PricingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
