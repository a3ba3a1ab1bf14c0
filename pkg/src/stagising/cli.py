"""Command-line driver.

Every report subcommand writes its delimited artifacts (CSV/JSON) and a
PNG figure rendered from the same data into the output directory
(--out, STAGISING_OUT, or the current directory).  Field-valued flags are
interpreted in the unit system of the config (s*Gamma by default); CSV
output columns are always in absolute energy units.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import classical, ed, io, plotting, slr, susceptibility
from .params import ModelParams
from .vmc import TrainConfig, train

DEFAULT_MODEL = {"n": 100, "s": 0.5, "alpha": 0.0, "gamma": 1.0,
                 "omega_x": 0.0, "omega_z": 0.0, "b": "auto", "beta": "inf"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stagising",
        description="Numerical laboratory for the staggered tunable-range "
                    "antiferromagnetic Ising chain.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML config file")
    common.add_argument("--out", type=Path, default=None,
                        help="output directory (default $STAGISING_OUT or .)")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--verbose", type=int, default=1)
    for name in ("n",):
        common.add_argument(f"--{name}", type=int, default=None)
    for name in ("s", "gamma", "omega-x", "omega-z"):
        common.add_argument(f"--{name}", type=float, default=None)
    common.add_argument("--alpha", type=str, default=None,
                        help='number or "inf"')
    common.add_argument("--beta", type=str, default=None,
                        help='number or "inf" (in 1/(s*Gamma) units)')
    common.add_argument("--b", type=str, default=None,
                        help='number or "auto"')

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phase-diagram", parents=[common],
                       help="m_s over a field grid with the critical line")
    p.add_argument("--wx-max", type=float, default=1.5)
    p.add_argument("--wz-max", type=float, default=2.5)
    p.add_argument("--nx", type=int, default=41)
    p.add_argument("--nz", type=int, default=41)

    p = sub.add_parser("slice", parents=[common],
                       help="1D slice of m_s (or VMC m_s^2) along one axis")
    p.add_argument("--axis", choices=("omega_x", "omega_z"), default="omega_x")
    p.add_argument("--min", type=float, default=0.0)
    p.add_argument("--max", type=float, default=1.5)
    p.add_argument("--count", type=int, default=31)
    p.add_argument("--vmc", action="store_true",
                   help="estimate m_s^2 with the VMC engine per point")

    p = sub.add_parser("critical-line", parents=[common],
                       help="second-order critical line table")
    p.add_argument("--count", type=int, default=50)

    sub.add_parser("tricritical", parents=[common],
                   help="closed-form vs scan-located tricritical point")

    p = sub.add_parser("susceptibility", parents=[common],
                       help="closed-form susceptibility matrix dump")
    p.add_argument("--mask-diagonal", action="store_true")

    p = sub.add_parser("decay-fit", parents=[common],
                       help="power-law fits of chi_r per sublattice family")
    p.add_argument("--scan-alpha", type=float, nargs="*", default=None,
                   help="also fit alpha_chi vs alpha over these exponents")

    sub.add_parser("classical", parents=[common],
                   help="two-angle landscape and its global minimum (alpha=0)")

    p = sub.add_parser("ed", parents=[common],
                       help="exact diagonalization spectrum and observables")
    p.add_argument("--levels", type=int, default=5)
    p.add_argument("--dump-state", type=Path, default=None,
                   help="write the ground state as a binary vector")

    p = sub.add_parser("ed-compare", parents=[common],
                       help="full-chain vs big-spin level comparison")
    p.add_argument("--axis", choices=("omega_x", "omega_z"),
                   default="omega_z")
    p.add_argument("--min", type=float, default=0.0)
    p.add_argument("--max", type=float, default=2.5)
    p.add_argument("--count", type=int, default=26)
    p.add_argument("--full-levels", type=int, default=15)
    p.add_argument("--bigspin-levels", type=int, default=5)

    p = sub.add_parser("vmc", parents=[common],
                       help="train the RBM and dump the trace")
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--chains", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)

    p = sub.add_parser("finite-t", parents=[common],
                       help="finite-temperature phase structure summary")
    p.add_argument("--betas", type=float, nargs="+",
                   default=[2.0, 1.4, 0.9],
                   help="beta values in units of 1/(s*Gamma)")

    p = sub.add_parser("check-reduction", parents=[common],
                       help="multivariate-minimization leak report")
    p.add_argument("--starts", type=int, default=20)

    p = sub.add_parser("variant", parents=[common],
                       help="intersublattice-only classical comparison")
    p.add_argument("--min", type=float, default=0.0)
    p.add_argument("--max", type=float, default=2.0)
    p.add_argument("--count", type=int, default=81)
    return parser


def _load_context(args):
    """(params, config, outdir, scale) from config file plus flag overrides."""
    config = io.load_config(args.config) if args.config else {"units": "sGamma"}
    model = dict(DEFAULT_MODEL)
    model.update(config.get("model", {}))
    for key in ("n", "s", "gamma", "omega_x", "omega_z"):
        val = getattr(args, key)
        if val is not None:
            model[key] = val
    # string-typed flags: keep the sentinel words, parse numbers here
    for key, word in (("alpha", "inf"), ("beta", "inf"), ("b", "auto")):
        val = getattr(args, key)
        if val is not None:
            model[key] = val if val == word else float(val)
    params = ModelParams.from_dict(model, units=config.get("units", "sGamma"))
    out = args.out or Path(os.environ.get("STAGISING_OUT", "."))
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    scale = params.sgamma if config.get("units", "sGamma") == "sGamma" else 1.0
    return params, config, out, scale


def _say(args, message):
    if args.verbose >= 1:
        print(message)


def _cmd_phase_diagram(args):
    params, config, out, scale = _load_context(args)
    wxs = np.linspace(0.0, args.wx_max * scale, args.nx)
    wzs = np.linspace(0.0, args.wz_max * scale, args.nz)
    diagram = slr.phase_diagram(params, wxs, wzs, jobs=args.jobs)
    row_orders = []
    for wz in wzs:
        rec = slr.classify_transition(params.replace(omega_z=float(wz)),
                                      "omega_x", wxs[0], wxs[-1])
        row_orders.append(rec.order)
    rows = []
    for iz, wz in enumerate(wzs):
        for ix, wx in enumerate(wxs):
            rows.append((wx, wz, params.beta, diagram.u_bar[iz, ix],
                         diagram.m_s[iz, ix], diagram.energy[iz, ix],
                         row_orders[iz]))
        _say(args, f"omega_z = {wz / params.sgamma:.3f} sG done "
                   f"(row order: {row_orders[iz]})")
    io.write_csv(out / "phase_diagram.csv",
                 ["omega_x", "omega_z", "beta", "u_bar", "m_s", "energy",
                  "order"], rows)
    io.write_json(out / "phase_diagram.json", {
        "sgamma": params.sgamma,
        "critical_line": diagram.critical_line,
        "tricritical": diagram.tricritical,
    })
    plotting.phase_diagram_heatmap(
        out / "phase_diagram.png", wxs, wzs,
        diagram.m_s / params.s, params.sgamma,
        critical_line=diagram.critical_line, tricritical=diagram.tricritical)
    return 0


def _cmd_slice(args):
    params, config, out, scale = _load_context(args)
    values = np.linspace(args.min * scale, args.max * scale, args.count)
    rows = []
    errors = None
    if args.vmc:
        cfg = _vmc_config(args, config)
        errors = []
        curve = []
        for v in values:
            p = params.replace(**{args.axis: float(v)})
            res = train(p, cfg)
            curve.append(res.m_s2)
            errors.append(res.m_s2_error)
            rows.append((v, res.m_s2, res.m_s2_error, res.energy,
                         res.energy_error, res.acceptance_rate,
                         res.converged))
            _say(args, f"{args.axis} = {v / params.sgamma:.3f} sG: "
                       f"m_s^2 = {res.m_s2:.4f} +- {res.m_s2_error:.1e}")
        io.write_csv(out / "slice.csv",
                     [args.axis, "ms2", "ms2_err", "energy", "energy_err",
                      "acceptance", "converged"], rows)
        ylabel = r"$\langle m_s^2 \rangle$"
    else:
        curve = []
        for v in values:
            p = params.replace(**{args.axis: float(v)})
            point = slr.minimize_univariate(p)
            curve.append(abs(point.m_s))
            rows.append((v, point.u_bar, point.m_s, point.energy))
            _say(args, f"{args.axis} = {v / params.sgamma:.3f} sG: "
                       f"m_s = {point.m_s:.6f}")
        io.write_csv(out / "slice.csv",
                     [args.axis, "u_bar", "m_s", "energy"], rows)
        ylabel = r"$|\bar m_s|$"
    plotting.slice_curve(out / "slice.png", values / params.sgamma, curve,
                         errors=errors,
                         xlabel=f"{args.axis} / (s Gamma)", ylabel=ylabel)
    return 0


def _cmd_critical_line(args):
    params, config, out, scale = _load_context(args)
    wx_tp, wz_tp = slr.tricritical_point(params.s, params.gamma)
    wxs = np.linspace(0.0, wx_tp, args.count)
    rows = []
    line = []
    for wx in wxs:
        wz = slr.second_order_line(float(wx), params.s, params.gamma)
        if wz is not None:
            rows.append((wx, wz))
            line.append((float(wx), float(wz)))
    io.write_csv(out / "critical_line.csv", ["omega_x", "omega_z"], rows)
    io.write_json(out / "critical_line.json", {
        "sgamma": params.sgamma,
        "polyline": line,
        "tricritical": [wx_tp, wz_tp],
    })
    arr = np.asarray(line)
    plotting.slice_curve(out / "critical_line.png",
                         arr[:, 0] / params.sgamma, arr[:, 1] / params.sgamma,
                         xlabel="omega_x / (s Gamma)",
                         ylabel="omega_z / (s Gamma)")
    _say(args, f"second-order line: {len(line)} points up to the "
               f"tricritical point ({wx_tp / params.sgamma:.5f}, "
               f"{wz_tp / params.sgamma:.5f}) sG")
    return 0


def _cmd_tricritical(args):
    params, config, out, scale = _load_context(args)
    closed = slr.tricritical_point(params.s, params.gamma)
    scanned = slr.scan_tricritical(params)
    sg = params.sgamma
    print(f"closed form: ({closed[0] / sg:.6f}, {closed[1] / sg:.6f}) sGamma")
    if scanned is None:
        print("scan: no c2 = c4 = 0 point found")
    else:
        print(f"scan:        ({scanned[0] / sg:.6f}, {scanned[1] / sg:.6f}) "
              f"sGamma")
    io.write_json(out / "tricritical.json", {
        "sgamma": sg,
        "closed_form": list(closed),
        "scan": None if scanned is None else list(scanned),
    })
    return 0


def _cmd_susceptibility(args):
    params, config, out, scale = _load_context(args)
    mat = susceptibility.chi_matrix(params)
    rows = [(i, j, mat.chi[i, j])
            for i in range(params.n) for j in range(params.n)
            if not (args.mask_diagonal and i == j)]
    io.write_csv(out / "chi_matrix.csv", ["row", "col", "value"], rows)
    io.write_json(out / "chi_summary.json", {
        "u_bar": mat.u_bar,
        "condition_number": mat.condition_number,
        "max_abs": float(np.abs(mat.chi).max()),
    })
    plotting.matrix_heatmap(out / "chi_matrix.png", mat.chi,
                            mask_diagonal=args.mask_diagonal)
    _say(args, f"chi computed at u_bar = {mat.u_bar:.6f} "
               f"(cond {mat.condition_number:.3e})")
    return 0


def _cmd_decay_fit(args):
    params, config, out, scale = _load_context(args)
    mat = susceptibility.chi_matrix(params)
    profiles = {}
    fits = {}
    rows = []
    payload = {"fits": {}}
    for family in susceptibility.FAMILIES:
        rs, vals = susceptibility.family_profile(mat.chi, family)
        profiles[family] = (rs, vals)
        fit = susceptibility.decay_fit(mat.chi, family)
        fits[family] = fit
        payload["fits"][family] = asdict(fit)
        for r, v in zip(rs, vals):
            rows.append((family, int(r), v))
        _say(args, f"family {family}: alpha_chi = {fit.exponent:.4f} "
                   f"(ok={fit.ok}{', ' + fit.reason if fit.reason else ''})")
    io.write_csv(out / "chi_profiles.csv", ["family", "r", "value"], rows)
    if args.scan_alpha:
        scan = susceptibility.slope_scan(args.scan_alpha, params)
        payload["slope_scan"] = {
            "alphas": list(scan.alphas), "exponents": list(scan.exponents),
            "slope": scan.slope, "intercept": scan.intercept,
            "family": scan.family,
        }
        _say(args, f"alpha_chi = {scan.slope:.4f} alpha + {scan.intercept:.4f}")
    io.write_json(out / "decay_fits.json", payload)
    plotting.decay_loglog(out / "chi_decay.png", profiles, fits)
    return 0


def _cmd_classical(args):
    params, config, out, scale = _load_context(args)
    minimum = classical.minimize_classical(params)
    thetas, grid = classical.landscape(params)
    rows = [(ta, tb, grid[i, j])
            for i, ta in enumerate(thetas) for j, tb in enumerate(thetas)]
    io.write_csv(out / "landscape.csv", ["theta_a", "theta_b", "energy"], rows)
    io.write_json(out / "classical_minimum.json", asdict(minimum))
    plotting.landscape_heatmap(out / "landscape.png", thetas, grid,
                               minimum=(minimum.theta_a, minimum.theta_b))
    _say(args, f"minimum at ({minimum.theta_a:.4f}, {minimum.theta_b:.4f}), "
               f"m_s = {minimum.m_s:.6f}"
               f"{' (degenerate pair)' if minimum.degenerate else ''}")
    return 0


def _cmd_ed(args):
    params, config, out, scale = _load_context(args)
    result = ed.lowest_k(ed.build_full_hamiltonian(params),
                         args.levels, params)
    io.write_csv(out / "spectrum.csv", ["index", "energy"],
                 list(enumerate(result.eigenvalues)))
    obs = ed.observables(result.eigenvectors[:, 0], params,
                         energy=float(result.eigenvalues[0]))
    io.write_json(out / "observables.json", {
        "energy_per_site": obs.energy_per_site,
        "m_s": obs.m_s,
        "m_s2": obs.m_s2,
        "sx": obs.sx,
    })
    if args.dump_state:
        io.write_vector_binary(args.dump_state, result.eigenvectors[:, 0])
    _say(args, f"E0 = {result.eigenvalues[0]:.10f}  "
               f"m_s^2 = {obs.m_s2:.6f}")
    return 0


def _cmd_ed_compare(args):
    params, config, out, scale = _load_context(args)
    values = np.linspace(args.min * scale, args.max * scale, args.count)
    full_levels = []
    big_levels = []
    rows = []
    for v in values:
        p = params.replace(**{args.axis: float(v)})
        full = ed.lowest_k(ed.build_full_hamiltonian(p),
                           args.full_levels, p)
        big = ed.lowest_k(ed.build_bigspin_hamiltonian(p),
                          args.bigspin_levels, p, basis="bigspin")
        full_levels.append(full.eigenvalues)
        big_levels.append(big.eigenvalues)
        for k, e in enumerate(full.eigenvalues):
            rows.append((v, "full", k, e))
        for k, e in enumerate(big.eigenvalues):
            rows.append((v, "bigspin", k, e))
        _say(args, f"{args.axis} = {v / params.sgamma:.3f} sG: "
                   f"ground gap |dE| = "
                   f"{abs(full.eigenvalues[0] - big.eigenvalues[0]):.2e}")
    io.write_csv(out / "ed_compare.csv",
                 [args.axis, "basis", "level", "energy"], rows)
    plotting.level_comparison(out / "ed_compare.png",
                              values / params.sgamma, full_levels, big_levels,
                              xlabel=f"{args.axis} / (s Gamma)")
    return 0


def _vmc_config(args, config) -> TrainConfig:
    section = dict(config.get("vmc", {}))
    known = {f.name for f in TrainConfig.__dataclass_fields__.values()}
    unknown = set(section) - known
    if unknown:
        raise KeyError(f"unknown vmc config keys: {sorted(unknown)}")
    if args.seed is not None:
        section["seed"] = args.seed
    for flag, key in (("iters", "n_iters"), ("chains", "n_chains"),
                      ("samples", "n_samples")):
        val = getattr(args, flag, None)
        if val is not None:
            section[key] = val
    return TrainConfig(**section)


def _cmd_vmc(args):
    params, config, out, scale = _load_context(args)
    cfg = _vmc_config(args, config)
    result = train(params, cfg, verbose=args.verbose >= 2)
    rows = [(it, result.lr_history[it], result.energy_history[it],
             result.energy_err_history[it], result.ms2_history[it],
             result.ms2_err_history[it], result.accept_history[it])
            for it in range(len(result.energy_history))]
    io.write_csv(out / "vmc_trace.csv",
                 ["iter", "lr", "energy_mean", "energy_err", "ms2_mean",
                  "ms2_err", "acceptance"], rows)
    io.write_vector_binary(out / "vmc_params.bin",
                           result.ansatz.get_parameters())
    io.write_json(out / "vmc_summary.json", {
        "energy": result.energy, "energy_error": result.energy_error,
        "m_s2": result.m_s2, "m_s2_error": result.m_s2_error,
        "acceptance_rate": result.acceptance_rate,
        "converged": result.converged,
        "n_clamped": result.n_clamped,
        "n_skipped_steps": result.n_skipped_steps,
    })
    plotting.training_trace(out / "vmc_trace.png", result)
    _say(args, f"final energy/site {result.energy:.6f} "
               f"+- {result.energy_error:.1e}, m_s^2 {result.m_s2:.4f} "
               f"+- {result.m_s2_error:.1e}, converged={result.converged}")
    return 0


def _cmd_finite_t(args):
    params, config, out, scale = _load_context(args)
    betas = [b / params.sgamma for b in args.betas]
    summaries = slr.finite_T_summary(betas, params)
    rows = []
    payload = []
    for summary in summaries:
        rows.append((summary.beta, summary.has_first_order,
                     summary.has_ordered_phase,
                     len(summary.critical_line)))
        payload.append({
            "beta": summary.beta,
            "beta_sgamma": summary.beta * params.sgamma,
            "has_first_order": summary.has_first_order,
            "has_ordered_phase": summary.has_ordered_phase,
            "critical_line": summary.critical_line,
            "tricritical": summary.tricritical,
        })
        _say(args, f"beta sG = {summary.beta * params.sgamma:.2f}: "
                   f"first-order={summary.has_first_order}, "
                   f"ordered={summary.has_ordered_phase}")
    io.write_csv(out / "finite_t.csv",
                 ["beta", "has_first_order", "has_ordered_phase",
                  "critical_line_points"], rows)
    io.write_json(out / "finite_t.json", {"summaries": payload})
    return 0


def _cmd_check_reduction(args):
    params, config, out, scale = _load_context(args)
    report = slr.check_univariate_reduction(
        params, n_starts=args.starts,
        seed=0 if args.seed is None else args.seed)
    io.write_json(out / "reduction_report.json", asdict(report))
    _say(args, f"staggered u = {report.staggered_u:.8f}, max non-staggered "
               f"|u_k| = {report.max_nonstaggered_u:.3e} "
               f"over {report.n_starts} starts")
    return 0


def _cmd_variant(args):
    params, config, out, scale = _load_context(args)
    values = np.linspace(args.min * scale, args.max * scale, args.count)
    rows = []
    full_curve = []
    variant_curve = []
    for wx in values:
        p = params.replace(omega_x=float(wx))
        full = classical.minimize_classical(p)
        var = classical.minimize_classical(p, intersublattice_only=True)
        full_curve.append(abs(full.m_s))
        variant_curve.append(abs(var.m_s))
        rows.append((wx, full.m_s, var.m_s))
    io.write_csv(out / "variant.csv",
                 ["omega_x", "m_s_full", "m_s_intersublattice_only"], rows)

    def refined_jump(intersublattice_only):
        # refine the steepest grid interval by bisection: a continuous curve's
        # largest step shrinks with the interval, a true jump does not
        def ms(wx):
            return abs(classical.minimize_classical(
                params.replace(omega_x=float(wx)),
                intersublattice_only=intersublattice_only).m_s)
        curve = variant_curve if intersublattice_only else full_curve
        k = int(np.argmax(np.abs(np.diff(curve))))
        lo, hi = float(values[k]), float(values[k + 1])
        ms_lo, ms_hi = ms(lo), ms(hi)
        for _ in range(20):
            mid = 0.5 * (lo + hi)
            ms_mid = ms(mid)
            if abs(ms_mid - ms_lo) >= abs(ms_hi - ms_mid):
                hi, ms_hi = mid, ms_mid
            else:
                lo, ms_lo = mid, ms_mid
        return abs(ms_hi - ms_lo)

    step_full = refined_jump(False)
    step_var = refined_jump(True)
    threshold = slr.JUMP_THRESHOLD * params.s
    io.write_json(out / "variant.json", {
        "omega_z": params.omega_z,
        "jump_full": step_full,
        "jump_variant": step_var,
        "jump_threshold": threshold,
        "full_first_order": step_full > threshold,
        "variant_first_order": step_var > threshold,
    })
    fig_vals = values / params.sgamma
    plotting.slice_curve(out / "variant.png", fig_vals,
                         np.column_stack([full_curve, variant_curve]),
                         xlabel="omega_x / (s Gamma)", ylabel="|m_s|")
    _say(args, f"refined jump: full {step_full:.4f}, "
               f"variant {step_var:.4f} (threshold {threshold:.4f})")
    return 0


_COMMANDS = {
    "phase-diagram": _cmd_phase_diagram,
    "slice": _cmd_slice,
    "critical-line": _cmd_critical_line,
    "tricritical": _cmd_tricritical,
    "susceptibility": _cmd_susceptibility,
    "decay-fit": _cmd_decay_fit,
    "classical": _cmd_classical,
    "ed": _cmd_ed,
    "ed-compare": _cmd_ed_compare,
    "vmc": _cmd_vmc,
    "finite-t": _cmd_finite_t,
    "check-reduction": _cmd_check_reduction,
    "variant": _cmd_variant,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
