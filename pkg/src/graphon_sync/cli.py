"""Command-line interface: sampling, single runs, sweeps, bounds, identity checks."""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import experiments, reduction, theory
from .dynamics import discretize_initial, kuramoto, prepare_cds_rhs, sakaguchi
from .graphon import constant_graphon, discretize, product_sine_graphon, sample_network, write_edge_list
from .integrator import IntegratorConfig, integrate
from .observables import linf_distance

_GRAPHONS = {
    "constant-1": constant_graphon,
    "product-sine": product_sine_graphon,
}


def _parse_beta(text: str) -> float:
    """Float value, plus the convenience tokens 'pi' and 'pi/<denominator>'."""
    text = text.strip()
    if text == "pi":
        return math.pi
    if text.startswith("pi/"):
        return math.pi / float(text[3:])
    return float(text)


def _parse_list(text: str, conv):
    return [conv(tok) for tok in text.split(",") if tok.strip()]


def _load_config(args) -> experiments.ExperimentConfig:
    with open(args.config) as fh:
        data = json.load(fh)
    if getattr(args, "seed", None) is not None:
        data["master_seed"] = args.seed
    if getattr(args, "threads", None) is not None:
        data["threads"] = args.threads
    return experiments.ExperimentConfig.from_mapping(data)


def _cmd_sample_graph(args) -> int:
    g = _GRAPHONS[args.graphon]()
    net = sample_network(discretize(g, args.n), args.p, args.seed)
    write_edge_list(net, args.out)
    print(f"wrote {int(net.adjacency.sum()) // 2} edges to {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    cfg = experiments.ExperimentConfig(
        n_grid=(args.n,),
        p_grid=(args.p,),
        beta_grid=(args.beta,),
        trials=1,
        master_seed=args.seed,
        eta=args.eta,
        step=args.step,
        horizon=args.horizon,
    )
    record = experiments.run_trial(args.n, args.p, args.beta, args.seed, cfg)
    print(
        f"n={record.n} p={record.p:g} beta={record.beta:g} seed={record.seed} "
        f"connected={int(record.connected)} phase_sync={int(record.phase_sync)} "
        f"freq_sync={int(record.freq_sync)} final_r={record.final_r:.6g} "
        f"final_diameter={record.final_diameter:.6g}"
    )
    if args.out:
        experiments.emit_csv([record], args.out)
    return 0


def _cmd_phase_diagram(args) -> int:
    cfg = _load_config(args)
    cells, records = experiments.run_phase_diagram(cfg)
    experiments.emit_csv(cells, args.out)
    print(f"wrote {len(cells)} cells to {args.out}")
    if args.records_out:
        experiments.emit_csv(records, args.records_out)
        print(f"wrote {len(records)} trial records to {args.records_out}")
    return 0


def _cmd_convergence(args) -> int:
    rows = experiments.run_convergence_study(
        n_list=_parse_list(args.n_list, int),
        m_ref=args.m_ref,
        trials=args.trials,
        alpha=args.alpha,
        beta=args.beta,
        eta=args.eta,
        horizon=args.horizon,
        step=args.step,
        master_seed=args.seed,
    )
    experiments.emit_csv(rows, args.out)
    for row in rows:
        print(f"n={row.n}: median_linf={row.median_linf:.6g} ads_linf={row.ads_linf:.6g}")
    return 0


def _cmd_bound_curve(args) -> int:
    if args.n_list:
        n_values = _parse_list(args.n_list, int)
    else:
        n_values = range(args.n_min, args.n_max + 1)
    theory.write_bound_curve(args.out, n_values, _parse_list(args.betas, _parse_beta))
    print(f"wrote bound curves to {args.out}")
    return 0


def _cmd_ws_check(args) -> int:
    """Frame-solve residuals, Lyapunov rate identity, and reconstruction checks."""
    mesh = args.mesh
    profile = experiments.initial_profile(args.eta, seed=args.seed)
    initial = discretize_initial(profile, mesh)
    failures = 0

    def report(label: str, value: float, tol: float) -> None:
        nonlocal failures
        ok = value <= tol
        failures += 0 if ok else 1
        print(f"{label}: {value:.3g} <= {tol:g} [{'PASS' if ok else 'FAIL'}]")

    state, frame = reduction.solve_initial_frame(initial)
    v_drift, v_amp = reduction.frame_vector_field(
        state.amplitude, state.drift_phase, initial
    )
    report(f"frame mesh={mesh} vector-field residual", max(abs(v_drift), abs(v_amp)), 1e-10)
    report(
        f"frame mesh={mesh} constraint residual",
        max(frame.residual_mean, frame.residual_cos, frame.residual_sin),
        1e-8,
    )
    roundtrip = float(
        np.max(np.abs(reduction.reconstruct_field(state, frame).values - initial.values))
    )
    report(f"frame mesh={mesh} round-trip error", roundtrip, 1e-7)

    stride = max(1, round(1e-2 / args.step))
    for beta in _parse_list(args.betas, _parse_beta):
        traj = reduction.integrate_reduced(
            state, frame, beta, step=args.step, horizon=args.horizon, store_stride=stride
        )
        report(
            f"beta={beta:g} lyapunov-rate residual",
            reduction.lyapunov_rate_residual(traj, beta),
            1e-4,
        )
        coupling = kuramoto() if beta == 0.0 else sakaguchi(beta)
        cds = integrate(
            prepare_cds_rhs(constant_graphon(1.0), coupling, mesh),
            initial,
            IntegratorConfig(step=args.step, horizon=args.horizon, store_stride=stride),
        )
        gap = max(
            linf_distance(
                reduction.reconstruct_field(traj.state(k), frame), cds.field(k)
            )
            for k in range(len(traj))
        )
        report(f"beta={beta:g} reconstruction vs continuum", gap, 1e-3)
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphon-sync",
        description="Oscillator dynamics on graphon-sampled random networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample-graph", help="sample a network and export its edge list")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True, help="edge scaling factor alpha")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--graphon", choices=sorted(_GRAPHONS), default="constant-1")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample_graph)

    p = sub.add_parser("simulate", help="run one sampled-system trial")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--beta", type=_parse_beta, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eta", default="linear")
    p.add_argument("--horizon", type=float, default=200.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--out", default=None, help="optional one-row trial CSV")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("phase-diagram", help="run a full Monte Carlo sweep")
    p.add_argument("--config", required=True, help="JSON file mirroring ExperimentConfig")
    p.add_argument("--out", required=True, help="grid CSV destination")
    p.add_argument("--records-out", default=None, help="optional per-trial CSV")
    p.add_argument("--seed", type=int, default=None, help="override master_seed")
    p.add_argument("--threads", type=int, default=None, help="override worker count")
    p.set_defaults(func=_cmd_phase_diagram)

    p = sub.add_parser("convergence", help="sampled/averaged vs continuum errors")
    p.add_argument("--n-list", default="64,128,256,512")
    p.add_argument("--m-ref", type=int, default=4096)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=_parse_beta, default=0.0)
    p.add_argument("--eta", default="linear")
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_convergence)

    p = sub.add_parser("bound-curve", help="export the synchronization bound curves")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=100)
    p.add_argument("--n-list", default=None)
    p.add_argument("--betas", default="0,pi/50,pi/25")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_bound_curve)

    p = sub.add_parser("ws-check", help="reduced-model identity checks")
    p.add_argument("--mesh", type=int, default=512)
    p.add_argument("--betas", default="0,pi/50,pi/25")
    p.add_argument("--horizon", type=float, default=5.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--eta", default="linear")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_ws_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
