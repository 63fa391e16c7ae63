"""Command-line entry point: run simulations, batches and surface dumps."""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import PRESETS, PROTOCOL_NAMES, ConfigError, parse_config
from .csvio import (
    cluster_rows,
    read_positions_csv,
    write_clusters_csv,
    write_fis1_surface,
    write_fis2_surface,
    write_metrics_csv,
    write_positions_csv,
    write_summary_csv,
)
from .fis1 import default_rulebase1
from .fis2 import default_rulebase2
from .network import deploy, network_from_positions
from .protocols import KIND_FUZZY_UNEQUAL, KIND_TYPE2
from .simulator import run_simulation


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuzzcluster",
        description="Deterministic round-based WSN clustering simulator",
    )
    src = parser.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESETS), help="built-in scenario")
    src.add_argument("--config", help="path to a key=value config file")
    parser.add_argument("--protocol", choices=sorted(PROTOCOL_NAMES), help="override protocol")
    parser.add_argument("--seed", type=int, help="override RNG seed")
    parser.add_argument("--seeds", type=int, default=1, help="batch size: run seeds seed..seed+N-1")
    parser.add_argument("--rounds", type=int, help="override max_rounds")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--dump-clusters", action="store_true", help="per-round cluster CSV")
    parser.add_argument(
        "--dump-fis-surface", action="store_true", help="input->output grid CSV for the engine"
    )
    parser.add_argument("--positions", help="replay an exact topology from a positions CSV")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.preset if args.preset else args.config)
        if args.protocol:
            cfg = replace(cfg, protocol=replace(cfg.protocol, kind=PROTOCOL_NAMES[args.protocol]))
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("seed: must be nonnegative")
            cfg = cfg.with_seed(args.seed)
        if args.rounds is not None:
            if args.rounds < 1:
                raise ConfigError("rounds: must be at least 1")
            cfg = replace(cfg, max_rounds=args.rounds)
        if args.seeds < 1:
            raise ConfigError("seeds: must be at least 1")
        if args.positions:
            cfg = replace(cfg, positions=read_positions_csv(args.positions))
        cfg.validate()

        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)

        if args.dump_fis_surface:
            _dump_surface(cfg, out)

        results = []
        for k in range(args.seeds):
            run_cfg = cfg.with_seed(cfg.seed + k)
            suffix = f"_seed{run_cfg.seed}" if args.seeds > 1 else ""
            collected: list[tuple] = []

            def collect(rnd, plan, sink=collected):
                sink.extend(cluster_rows(rnd, plan.clusters, plan.routes))

            result = run_simulation(run_cfg, on_round=collect if args.dump_clusters else None)
            results.append(result)
            write_metrics_csv(result, out / f"metrics{suffix}.csv")
            if args.dump_clusters:
                write_clusters_csv(collected, out / f"clusters{suffix}.csv")
            net = (
                network_from_positions(
                    run_cfg.positions, run_cfg.area_side, run_cfg.bs_pos, run_cfg.initial_energy
                )
                if run_cfg.positions is not None
                else deploy(
                    run_cfg.n, run_cfg.area_side, run_cfg.bs_pos, run_cfg.seed, run_cfg.initial_energy
                )
            )
            write_positions_csv(net, out / f"positions{suffix}.csv")
            print(
                f"seed={result.seed} protocol={result.protocol} "
                f"fnd={result.fnd} hnd={result.hnd} lnd={result.lnd}"
            )
        write_summary_csv(results, out / "summary.csv")
    except (ConfigError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


def _dump_surface(cfg, out: Path) -> None:
    if cfg.protocol.kind == KIND_FUZZY_UNEQUAL:
        rb = cfg.rules1 or default_rulebase1()
        write_fis1_surface(rb, cfg.coa_samples, out / "fis_surface.csv")
    elif cfg.protocol.kind == KIND_TYPE2:
        rb = cfg.rules2 or default_rulebase2(cfg.blur, cfg.blur_overrides)
        write_fis2_surface(rb, out / "fis_surface.csv")
    else:
        raise ConfigError("--dump-fis-surface requires a fuzzy protocol (fuzzy-unequal or type2fl)")


if __name__ == "__main__":
    sys.exit(main())
