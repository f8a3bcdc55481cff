"""Command-line interface.

Signals travel as CSV profiles (columns x,u(,w,f)) and images as 8-bit PGM;
the input extension picks the format. Every run writes a JSON report (the
parameters, iteration trace and timings) next to its primary output as
<stem>.report.json. Exit codes: 0 success, 1 verification failure, 2 invalid
input, 3 non-finite solver state.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .analytic import StepModel, StepProblem, classify_step, step_solution, verify_optimality_1d
from .bregman import bregmanized_denoise
from .decompose import decompose
from .grids import Image2D, Mode, NonFiniteError, SolveParams
from .io import (
    FileFormatError,
    csv_to_signal,
    read_csv_profile,
    read_pgm,
    write_csv_profile,
    write_json_report,
    write_pgm,
)
from .metrics import psnr, ssim
from .phantoms import KINDS, NoiseSpec, PhantomSpec, add_gaussian_noise, generate
from .solver import denoise, denoise_rof


def _is_csv(path: str | Path) -> bool:
    return Path(path).suffix.lower() in (".csv", ".txt")


def _report_path(primary_out: str | Path) -> Path:
    out = Path(primary_out)
    return out.parent / (out.stem + ".report.json")


def _load_input(path: str, column: str | None = None):
    """Returns (image, x_or_None, (lo, hi))."""
    if _is_csv(path):
        cols = read_csv_profile(path)
        img = csv_to_signal(path, column=column)
        x = cols.get("x")
        return img, x, (0.0, 1.0)
    img, rng = read_pgm(path)
    return img, None, rng


def _x_axis(img: Image2D, x) -> np.ndarray:
    if x is not None:
        return np.asarray(x)
    n = img.shape[0]
    return (np.arange(n) + 0.5) * img.spacing


def _save_signal_or_image(img: Image2D, path: str, x, rng, extra_cols=None) -> None:
    if _is_csv(path):
        cols = {"x": _x_axis(img, x), "u": img.values[:, 0]}
        if extra_cols:
            cols.update(extra_cols)
        write_csv_profile(path, cols)
    else:
        write_pgm(img, path, lo=rng[0], hi=rng[1])


def _solver_params(args, two_d_default_quadrature=None) -> SolveParams:
    quadrature = True if getattr(args, "quadrature", False) else two_d_default_quadrature
    return SolveParams(
        alpha=args.alpha,
        beta=args.beta,
        p=args.p,
        mode=Mode(args.mode),
        lam=getattr(args, "lam", None),
        tol=args.tol,
        max_outer=args.max_iter,
        quadrature=quadrature,
    )


def _base_report(args, command: str) -> dict:
    params = {
        k: v for k, v in vars(args).items() if k not in ("func",) and v is not None
    }
    return {"command": command, "parameters": params}


def _add_solver_flags(sp, alpha_required=True):
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--alpha", type=float, required=alpha_required)
    sp.add_argument("--beta", type=float, required=alpha_required)
    sp.add_argument("--mode", choices=["1hom", "phom"], default="1hom")
    sp.add_argument("--lambda", dest="lam", type=float, default=None)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--max-iter", dest="max_iter", type=int, default=5000)
    sp.add_argument("--quadrature", action="store_true", default=False)


def _cmd_gen(args) -> int:
    spec = PhantomSpec(
        kind=args.kind, h=args.h, L=args.L, n=args.n, slope=args.slope, size=args.size
    )
    img = generate(spec)
    if _is_csv(args.out):
        n = img.shape[0]
        x = -args.L + (np.arange(n) + 0.5) * img.spacing
        write_csv_profile(args.out, {"x": x, "f": img.values[:, 0]})
    else:
        write_pgm(img, args.out, lo=args.lo, hi=args.hi)
    report = _base_report(args, "gen")
    report["outputs"] = {"out": args.out, "shape": list(img.shape)}
    report["timings"] = {}
    write_json_report(_report_path(args.out), report)
    return 0


def _cmd_noise(args) -> int:
    img, x, rng = _load_input(getattr(args, "in"))
    noisy = add_gaussian_noise(img, NoiseSpec(variance=args.variance, seed=args.seed))
    if _is_csv(args.out):
        write_csv_profile(args.out, {"x": _x_axis(noisy, x), "f": noisy.values[:, 0]})
    else:
        write_pgm(noisy, args.out, lo=rng[0], hi=rng[1])
    report = _base_report(args, "noise")
    report["outputs"] = {"out": args.out}
    report["timings"] = {}
    write_json_report(_report_path(args.out), report)
    return 0


def _cmd_denoise(args) -> int:
    f, x, rng = _load_input(getattr(args, "in"))
    params = _solver_params(args)
    u, w, rep = denoise(f, params)
    extra = {"w": w.comp1[:, 0], "f": f.values[:, 0]} if _is_csv(args.out) else None
    _save_signal_or_image(u, args.out, x, rng, extra_cols=extra)
    report = _base_report(args, "denoise")
    report["trace"] = rep.to_dict()
    report["timings"] = {"wall_time": report["trace"].pop("wall_time")}
    report["outputs"] = {"out": args.out}
    write_json_report(_report_path(args.out), report)
    return 0


def _cmd_rof(args) -> int:
    f, x, rng = _load_input(getattr(args, "in"))
    u, rep = denoise_rof(f, alpha=args.alpha, lam=args.lam, tol=args.tol, max_outer=args.max_iter)
    extra = {"f": f.values[:, 0]} if _is_csv(args.out) else None
    _save_signal_or_image(u, args.out, x, rng, extra_cols=extra)
    report = _base_report(args, "rof")
    report["trace"] = rep.to_dict()
    report["timings"] = {"wall_time": report["trace"].pop("wall_time")}
    report["outputs"] = {"out": args.out}
    write_json_report(_report_path(args.out), report)
    return 0


def _cmd_bregman(args) -> int:
    f, x, rng = _load_input(getattr(args, "in"))
    reference = None
    if args.ref:
        reference, _, _ = _load_input(args.ref)
    params = _solver_params(args)
    iterates, trace = bregmanized_denoise(
        f, params, outer_k=args.iters, reference=reference, peak=args.peak
    )
    pick = trace.best_ssim_index() if reference is not None else len(iterates) - 1
    u = iterates[pick]
    extra = {"f": f.values[:, 0]} if _is_csv(args.out) else None
    _save_signal_or_image(u, args.out, x, rng, extra_cols=extra)
    report = _base_report(args, "bregman")
    report["outputs"] = {"out": args.out, "selected_iteration": pick + 1}
    report["trace"] = {
        "psnr": trace.psnr_trace,
        "ssim": trace.ssim_trace,
        "inner_iterations": [r.iterations for r in trace.reports],
    }
    report["timings"] = {"wall_time": sum(r.wall_time for r in trace.reports)}
    write_json_report(_report_path(args.out), report)
    return 0


def _cmd_decompose(args) -> int:
    f, x, rng = _load_input(getattr(args, "in"))
    dec = decompose(
        f, alpha=args.alpha, beta=args.beta, p=args.p,
        tol=args.tol, max_outer=args.max_iter,
        quadrature=True if args.quadrature else None,
    )
    extra_u = {"f": f.values[:, 0]} if _is_csv(args.out_u) else None
    _save_signal_or_image(dec.u_part, args.out_u, x, rng, extra_cols=extra_u)
    if _is_csv(args.out_v):
        write_csv_profile(args.out_v, {"x": _x_axis(dec.v_part, x), "u": dec.v_part.values[:, 0]})
    else:
        vmin = float(np.min(dec.v_part.values))
        vmax = float(np.max(dec.v_part.values))
        span = (vmax - vmin) or 1.0
        write_pgm(dec.v_part, args.out_v, lo=vmin - 0.05 * span, hi=vmax + 0.05 * span)
    report = _base_report(args, "decompose")
    report["trace"] = dec.report.to_dict()
    report["timings"] = {"wall_time": report["trace"].pop("wall_time")}
    report["outputs"] = {"out_u": args.out_u, "out_v": args.out_v}
    write_json_report(_report_path(args.out_u), report)
    return 0


def _cmd_analytic(args) -> int:
    problem = StepProblem(
        h=args.h, L=args.L, alpha=args.alpha, beta=args.beta,
        p=args.p, model=StepModel(args.model),
    )
    regime = classify_step(problem)
    sol = step_solution(problem)
    t = 2.0 * args.L / args.n
    x = -args.L + (np.arange(args.n) + 0.5) * t
    write_csv_profile(
        args.out_csv,
        {"x": x, "u": sol.u(x), "w": sol.w(x), "f": problem.data(x)},
    )
    print(f"regime: {regime.value}")
    report = _base_report(args, "analytic")
    report["outputs"] = {
        "out_csv": args.out_csv,
        "regime": regime.value,
        "k": sol.k,
        "c1": sol.c1,
        "c2": sol.c2,
    }
    report["timings"] = {}
    write_json_report(_report_path(args.out_csv), report)
    return 0


def _cmd_verify(args) -> int:
    u = csv_to_signal(args.u, column="u").to_grid1d()
    w = csv_to_signal(args.w, column="w").to_grid1d()
    f = csv_to_signal(args.f, column="f").to_grid1d()
    params = SolveParams(
        alpha=args.alpha, beta=args.beta, p=args.p, mode=Mode(args.mode), quadrature=True
    )
    cert = verify_optimality_1d(u, w, f, params)
    eps = args.eps if args.eps is not None else 1e-3 * args.alpha
    ok = cert.passed(eps)
    print(f"boundary_residual: {cert.boundary_residual:.6e}")
    print(f"sup_residual:      {cert.sup_residual:.6e}")
    print(f"sign_residual:     {cert.sign_residual:.6e}")
    print(f"w_residual:        {cert.w_residual:.6e}  (w treated as zero: {cert.w_is_zero})")
    print(f"threshold:         {eps:.6e}  ->  {'PASS' if ok else 'FAIL'}")
    report = _base_report(args, "verify")
    report["outputs"] = {
        "boundary_residual": cert.boundary_residual,
        "sup_residual": cert.sup_residual,
        "sign_residual": cert.sign_residual,
        "w_residual": cert.w_residual,
        "w_is_zero": cert.w_is_zero,
        "threshold": eps,
        "passed": ok,
    }
    report["timings"] = {}
    write_json_report(_report_path(args.u), report)
    return 0 if ok else 1


def _cmd_metrics(args) -> int:
    u, _, _ = _load_input(getattr(args, "in"))
    ref, _, _ = _load_input(args.ref)
    value_psnr = psnr(u, ref, peak=args.peak)
    n, m = u.shape
    value_ssim = ssim(u, ref, dynamic_range=args.peak) if min(n, m) >= 11 else None
    print(f"psnr: {value_psnr:.4f} dB")
    if value_ssim is not None:
        print(f"ssim: {value_ssim:.4f}")
    report = _base_report(args, "metrics")
    report["outputs"] = {"psnr": value_psnr, "ssim": value_ssim}
    report["timings"] = {}
    write_json_report(_report_path(getattr(args, "in")), report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tvlp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen", help="generate a phantom")
    sp.add_argument("--kind", choices=KINDS, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--h", type=float, default=100.0)
    sp.add_argument("--L", type=float, default=1.0)
    sp.add_argument("--n", type=int, default=2000)
    sp.add_argument("--slope", type=float, default=0.1)
    sp.add_argument("--size", type=int, default=200)
    sp.add_argument("--lo", type=float, default=0.0)
    sp.add_argument("--hi", type=float, default=1.0)
    sp.set_defaults(func=_cmd_gen)

    sp = sub.add_parser("noise", help="add seeded Gaussian noise")
    sp.add_argument("--in", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--variance", type=float, default=0.01)
    sp.add_argument("--seed", type=int, default=42)
    sp.set_defaults(func=_cmd_noise)

    sp = sub.add_parser("denoise", help="TV-Lp denoising")
    sp.add_argument("--in", required=True)
    sp.add_argument("--out", required=True)
    _add_solver_flags(sp)
    sp.set_defaults(func=_cmd_denoise)

    sp = sub.add_parser("rof", help="ROF (plain TV) denoising")
    sp.add_argument("--in", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--lambda", dest="lam", type=float, default=None)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--max-iter", dest="max_iter", type=int, default=5000)
    sp.set_defaults(func=_cmd_rof)

    sp = sub.add_parser("bregman", help="Bregmanised TV-Lp denoising")
    sp.add_argument("--in", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--iters", type=int, required=True)
    sp.add_argument("--ref", default=None)
    sp.add_argument("--peak", type=float, default=1.0)
    _add_solver_flags(sp)
    sp.set_defaults(func=_cmd_bregman)

    sp = sub.add_parser("decompose", help="piecewise-constant + smooth decomposition")
    sp.add_argument("--in", required=True)
    sp.add_argument("--out-u", dest="out_u", required=True)
    sp.add_argument("--out-v", dest="out_v", required=True)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--max-iter", dest="max_iter", type=int, default=5000)
    sp.add_argument("--quadrature", action="store_true", default=False)
    sp.set_defaults(func=_cmd_decompose)

    sp = sub.add_parser("analytic", help="closed-form step solution")
    sp.add_argument("--h", type=float, default=100.0)
    sp.add_argument("--L", type=float, default=1.0)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--model", choices=["1hom", "2hom"], default="2hom")
    sp.add_argument("--n", type=int, default=2000)
    sp.add_argument("--out-csv", dest="out_csv", required=True)
    sp.set_defaults(func=_cmd_analytic)

    sp = sub.add_parser("verify", help="dual-certificate optimality check")
    sp.add_argument("--u", required=True)
    sp.add_argument("--w", required=True)
    sp.add_argument("--f", required=True)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--mode", choices=["1hom", "phom"], default="1hom")
    sp.add_argument("--eps", type=float, default=None)
    sp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("metrics", help="PSNR/SSIM against a reference")
    sp.add_argument("--in", required=True)
    sp.add_argument("--ref", required=True)
    sp.add_argument("--peak", type=float, default=1.0)
    sp.set_defaults(func=_cmd_metrics)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NonFiniteError as exc:
        print(f"error: solver produced non-finite values: {exc}", file=sys.stderr)
        return 3
    except (FileFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
