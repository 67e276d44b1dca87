"""Command-line front end: JSON/CSV reports and SVG figures.

Exit codes: 0 success (or verification passed), 1 verification violations or
a computation failure (serialised into the report), 2 usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import mpmath

from . import __version__
from .errors import DomainError, ThetaAtlasError
from .series import PrecisionConfig, to_mpc, to_mpf

MIN_DIGITS, MAX_DIGITS = 10, 60
# printed digits may go below the computational floor; the arithmetic never does
MIN_OUTPUT_DIGITS = 6
SCHEMA_ID = "theta-atlas/report"
SCHEMA_VERSION = 1
FUNCTIONS = ("theta", "theta-star", "G", "bilateral", "theta-x", "theta-q")
THEOREMS = ("T1", "T2b", "T3", "bounds", "propmain", "tau", "c1", "spectral-disk")
VIEWPORT = (-9.0, 6.0, -7.0, 7.0)
VALUE_FLAGS = ("--x",)
SVG_SCALE = 40.0


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CommandConfig:
    subcommand: str
    q: list
    x: mpmath.mpc | None
    digits: int
    radius: float | None
    output: str | None
    fmt: str

    @property
    def prec(self) -> PrecisionConfig:
        return PrecisionConfig.for_digits(max(self.digits, MIN_DIGITS))


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def parse_grid(spec: str) -> list:
    """"lo:hi:step" -> strictly increasing list in (0, 1), hi included when on the grid."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be lo:hi:step, got {spec!r}")
    try:
        lo, hi, step = (mpmath.mpf(p) for p in parts)
    except (ValueError, TypeError):
        raise UsageError(f"bad grid {spec!r}")
    if step <= 0 or hi < lo:
        raise UsageError(f"grid needs step > 0 and hi >= lo, got {spec!r}")
    n = int(mpmath.floor((hi - lo) / step + mpmath.mpf("1e-9")))
    decimals = max(len(p.split(".")[1]) if "." in p else 0 for p in parts)
    grid = [round(float(lo + k * step), decimals + 2) for k in range(n + 1)]
    if not grid or grid[0] <= 0 or grid[-1] >= 1:
        raise UsageError(f"grid must lie in (0, 1), got {spec!r}")
    return grid


def parse_q(s: str) -> mpmath.mpf:
    try:
        q = to_mpf(s)
    except (ValueError, TypeError, DomainError):
        raise UsageError(f"bad q {s!r}")
    if not 0 < q < 1:
        raise UsageError(f"q must lie in (0, 1), got {s}")
    return q


def parse_x(s: str) -> mpmath.mpc:
    try:
        return to_mpc(s if "," in s else s + ",0")
    except (ValueError, TypeError, DomainError):
        raise UsageError(f"x must be 're,im', got {s!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="theta-atlas", description="Zeros, spectrum and region checks for the partial theta function.")
    p.add_argument("--version", action="version", version=f"theta-atlas {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, formats=("json", "csv")):
        sp.add_argument("--digits", type=int, default=15, help="significant digits (6..60)")
        sp.add_argument("--output", "-o", help="write to this path instead of stdout")
        sp.add_argument("--format", dest="fmt", choices=formats, default=formats[0])

    e = sub.add_parser("eval", help="evaluate theta, Theta*, G or a derivative at one point")
    e.add_argument("--q", required=True)
    e.add_argument("--x", required=True, help="re,im")
    e.add_argument("--fn", choices=FUNCTIONS, default="theta")
    common(e)

    z = sub.add_parser("zeros", help="all zeros in |x| < radius (or the first real zeros)")
    g = z.add_mutually_exclusive_group(required=True)
    g.add_argument("--q")
    g.add_argument("--q-grid")
    z.add_argument("--radius", type=float, default=50.0)
    z.add_argument("--real", type=int, metavar="N", help="list the first N real zeros instead")
    common(z)

    s = sub.add_parser("spectrum", help="spectral values q~_k and double zeros y_k")
    s.add_argument("--from", dest="k_from", type=int, default=1)
    s.add_argument("--to", dest="k_to", type=int, default=25)
    common(s)

    v = sub.add_parser("verify", help="theorem sweeps and proof checks")
    v.add_argument("--theorem", choices=THEOREMS, required=True)
    v.add_argument("--q-grid")
    v.add_argument("--radius", type=float, default=55.0)
    common(v)

    c = sub.add_parser("contour", help="region geometry with the zeros for one q")
    c.add_argument("--q", required=True)
    c.add_argument("--radius", type=float, default=12.0)
    common(c, formats=("svg", "json"))

    k = sub.add_parser("constants", help="proof constants")
    common(k)
    return p


# ---------------------------------------------------------------------------
# formatting helpers
# ---------------------------------------------------------------------------

def num(v, digits: int) -> str:
    v = mpmath.mpf(v)
    if v == 0:
        return "0"
    return mpmath.nstr(v, digits, min_fixed=-5, max_fixed=12)


def err(v) -> str:
    v = mpmath.mpf(v)
    return "0" if v == 0 else mpmath.nstr(v, 3, min_fixed=1, max_fixed=0)


def cplx(v, digits: int) -> dict:
    v = mpmath.mpc(v)
    return {"re": num(v.real, digits), "im": num(v.imag, digits)}


def _location_error(z):
    # |theta'| >= deriv_lower on the certification disk, so the zero is within residual/deriv_lower
    if z.certified and z.deriv_lower > 0:
        return min(z.residual / z.deriv_lower, z.cert_radius)
    return z.cert_radius


def _zero_record(z, digits: int) -> dict:
    return {"re": num(z.location.real, digits), "im": num(z.location.imag, digits),
            "modulus": num(abs(z.location), digits), "abs_error": err(_location_error(z)),
            "residual": err(z.residual), "deriv_lower": num(z.deriv_lower, 6), "status": z.status}


# ---------------------------------------------------------------------------
# commands; each returns (result dict, csv rows, exit code)
# ---------------------------------------------------------------------------

def cmd_eval(a, cfg: CommandConfig):
    from . import series
    q, x, d = cfg.q[0], cfg.x, cfg.digits
    fn = {"theta": series.eval_theta, "theta-star": series.eval_theta_star, "G": series.eval_G,
          "bilateral": series.eval_bilateral_series,
          "theta-x": lambda q, x, p: series.eval_theta_partial(q, x, dx=1, prec=p),
          "theta-q": lambda q, x, p: series.eval_theta_partial(q, x, dq=1, prec=p)}[a.fn]
    r = fn(q, x, cfg.prec)
    res = {"fn": a.fn, "q": num(q, d), "x": cplx(x, d), "value": cplx(r.value, d),
           "modulus": num(abs(r.value), d), "abs_error": err(r.abs_error), "terms_used": r.terms_used}
    row = [a.fn, res["q"], res["x"]["re"], res["x"]["im"], res["value"]["re"], res["value"]["im"],
           res["abs_error"]]
    return res, (["fn", "q", "x_re", "x_im", "value_re", "value_im", "abs_error"], [row]), 0


def cmd_zeros(a, cfg: CommandConfig):
    from .complexzeros import find_all_zeros
    from .realzeros import list_real_zeros
    d = cfg.digits
    header = ["q", "index", "re", "im", "modulus", "abs_error", "residual", "deriv_lower", "status"]
    rows, blocks = [], []
    if a.real is not None:
        if a.real < 1:
            raise UsageError("--real needs N >= 1")
        for q in cfg.q:
            lst = list_real_zeros(q, a.real, cfg.prec)
            zs = [{"k": z.k, "re": num(z.location, d), "im": "0", "modulus": num(abs(z.location), d),
                   "abs_error": err(abs(z.location) * cfg.prec.tolerance), "residual": err(z.residual),
                   "status": "certified"} for z in lst.zeros]
            blocks.append({"q": num(q, d), "first_index": lst.first_index, "gap": lst.gap, "zeros": zs})
            rows += [[num(q, d), z["k"], z["re"], "0", z["modulus"], z["abs_error"], z["residual"], "",
                      z["status"]] for z in zs]
        return {"kind": "real", "blocks": blocks}, (header, rows), 0
    code = 0
    seeds = None
    for q in cfg.q:
        inv = find_all_zeros(q, cfg.radius, cfg.prec, seeds=seeds)
        seeds = inv.as_complex() if len(inv) else None
        zs = [_zero_record(z, d) for z in inv.zeros]
        if not (inv.complete and inv.all_certified):
            code = 1
        blocks.append({"q": num(q, d), "radius": num(cfg.radius, 6), "winding_count": inv.winding_count,
                       "complete": inv.complete, "all_certified": inv.all_certified,
                       "pair_count": inv.pair_count, "zeros": zs})
        rows += [[num(q, d), i] + [z[h] for h in header[2:]] for i, z in enumerate(zs)]
    return {"kind": "all", "blocks": blocks}, (header, rows), code


def cmd_spectrum(a, cfg: CommandConfig):
    from .spectrum import MAX_INDEX, find_spectral_point
    if not 1 <= a.k_from <= a.k_to <= MAX_INDEX:
        raise UsageError(f"need 1 <= --from <= --to <= {MAX_INDEX}")
    d = cfg.digits
    out, rows = [], []
    for k in range(a.k_from, a.k_to + 1):
        sp = find_spectral_point(k, cfg.prec)
        rec = {"k": k, "q_tilde": num(sp.q_tilde, d), "y_double": num(sp.y_double, d),
               "abs_error": err(cfg.prec.tolerance), "method": sp.method}
        out.append(rec)
        rows.append([k, rec["q_tilde"], rec["y_double"], rec["abs_error"]])
    return {"points": out}, (["k", "q_tilde", "y_double", "abs_error"], rows), 0


def _plain(v, d):
    if isinstance(v, (mpmath.mpf, mpmath.mpc)):
        return num(v, d) if isinstance(v, mpmath.mpf) else cplx(v, d)
    if isinstance(v, float):
        return num(v, d)
    if isinstance(v, dict):
        return {k: _plain(w, d) for k, w in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(w, d) for w in v]
    return v


def cmd_verify(a, cfg: CommandConfig):
    from .regions import proofs, sweeps
    d = cfg.digits
    th = a.theorem
    if th in sweeps.THEOREMS:
        if not a.q_grid:
            raise UsageError(f"--q-grid is required for {th}")
        try:
            rep = sweeps.verify_theorem(th, cfg.q, cfg.radius, cfg.prec)
        except DomainError as e:
            raise UsageError(str(e))
        viol = [{"q": num(q, 6), "zero": cplx(z, d)} for q, z in rep.violations]
        res = {"theorem": th, "passed": rep.passed, "region": _plain(rep.region.describe(), d),
               "q_grid": [num(q, 6) for q in rep.q_grid], "radius_cap": num(rep.radius_cap, 6),
               "zeros_checked": rep.zeros_checked, "violations": viol,
               "worst_margin": None if rep.worst_margin is None else num(rep.worst_margin, 10),
               "worst_margin_q": None if rep.worst_margin_q is None else num(rep.worst_margin_q, 6),
               "max_modulus_right": None if rep.max_modulus_right is None else num(rep.max_modulus_right, 10),
               "max_modulus_left": None if rep.max_modulus_left is None else num(rep.max_modulus_left, 10),
               "warnings": [{"q": num(q, 6), "message": m} for q, m in rep.warnings],
               "katsnelson_outside": [{"q": num(q, 6), "zero": cplx(z, 10)} for q, z in rep.katsnelson_outside],
               "e_plus_outside": [{"q": num(q, 6), "zero": cplx(z, 10)} for q, z in rep.e_plus_outside]}
        rows = []
        for q in rep.q_grid:
            for z in rep.zero_inventory[q]:
                w = complex(z.location)
                if w.imag <= 0:
                    continue
                rows.append([num(q, 6), num(w.real, d), num(w.imag, d), num(abs(w), d),
                             num(rep.region.margin(w), 10), (q, w) in rep.violations])
        return res, (["q", "re", "im", "modulus", "margin", "violation"], rows), 0 if rep.passed else 1
    grid = cfg.q
    if th == "bounds":
        rep = proofs.check_bounds(grid or parse_grid("0.5:0.99:0.01"), cfg.prec)
    elif th == "propmain":
        rep = proofs.check_propmain(grid or parse_grid("0.5:0.99:0.005"), cfg.prec)
    elif th == "tau":
        rep = proofs.check_tau_lemma(cfg.prec)
    elif th == "c1":
        rep = proofs.check_c1_coefficient_argument(grid[0] if grid else mpmath.mpf("0.4"), cfg.prec)
    else:
        rep = proofs.spectral_disk_lemma()
    res = {"theorem": th, "passed": rep.passed, "values": _plain(rep.values, d),
           "details": _plain(rep.details, d)}
    keys = sorted({k for r in rep.details for k in r}) if rep.details else sorted(rep.values)
    src = rep.details if rep.details else [rep.values]
    rows = [[_csv_cell(_plain(r.get(k), d)) for k in keys] for r in src]
    return res, (keys, rows), 0 if rep.passed else 1


def _csv_cell(v):
    if isinstance(v, dict):
        return f"{v['re']}{'' if v['im'].startswith('-') else '+'}{v['im']}i"
    return v


def cmd_constants(a, cfg: CommandConfig):
    from .regions import proofs
    d = cfg.digits
    c = proofs.proof_constants(cfg.prec)
    t1, e1 = proofs.tau("0.2", 1, cfg.prec)
    t2, e2 = proofs.tau("0.2", 2, cfg.prec)
    grid = [mpmath.mpf("0.3") + k * mpmath.mpf("0.001") for k in range(201)]
    dmin = min(proofs.margin_c1(g) for g in grid)
    tol = cfg.prec.tolerance
    items = [
        ("zeta0", c["zeta0"], tol), ("kappa_dagger", c["kappa_dagger"], c["kappa_error"]),
        ("r0", c["r0"], tol), ("tau1(0.2)", t1, e1), ("tau2(0.2)", t2, e2),
        ("rho0", proofs.rho0(), tol), ("phi_c1(0.3)", proofs.phi_c1("0.3"), tol),
        ("phi_c1(0.5)", proofs.phi_c1("0.5"), tol), ("margin_c1_min", dmin, tol),
    ]
    res = {"constants": [{"name": n, "value": num(v, d), "abs_error": err(e)} for n, v, e in items]}
    return res, (["name", "value", "abs_error"], [[r["name"], r["value"], r["abs_error"]]
                                                   for r in res["constants"]]), 0


def cmd_contour(a, cfg: CommandConfig):
    from .complexzeros import find_all_zeros
    q = cfg.q[0]
    inv = find_all_zeros(q, cfg.radius, cfg.prec)
    zs = [complex(z.location) for z in inv.zeros]
    res = {"q": num(q, cfg.digits), "radius": num(cfg.radius, 6), "viewport": [num(v, 6) for v in VIEWPORT],
           "zeros": [_zero_record(z, cfg.digits) for z in inv.zeros]}
    rows = [[r["re"], r["im"]] for r in res["zeros"]]
    return res, (["re", "im"], rows), 0, render_svg(float(q), zs)


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

def _px(z: complex) -> tuple:
    x0, _, _, y1 = VIEWPORT
    return (z.real - x0) * SVG_SCALE, (y1 - z.imag) * SVG_SCALE


def _path(points, close=False) -> str:
    pts = [_px(p) for p in points]
    s = "M " + " L ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
    return s + (" Z" if close else "")


def _arc(r: float, a0: float, a1: float, n: int = 90) -> list:
    return [r * complex(math.cos(t), math.sin(t)) for t in (a0 + (a1 - a0) * k / n for k in range(n + 1))]


def render_svg(q: float, zeros) -> str:
    x0, x1, y0, y1 = VIEWPORT
    w, h = (x1 - x0) * SVG_SCALE, (y1 - y0) * SVG_SCALE
    kats_up = [math.exp(t) * complex(math.cos(t), math.sin(t)) for t in (math.pi * k / 200 for k in range(201))]
    kats = kats_up + [z.conjugate() for z in reversed(kats_up)]
    b = 3 / math.sqrt(2)
    dom_d = [complex(0, -b), complex(0, b), complex(-b, b)] + _arc(3.0, 3 * math.pi / 4, 5 * math.pi / 4) + [complex(-b, -b)]
    ann = _arc(5.0, -math.pi / 2, math.pi / 2) + list(reversed(_arc(1.0, -math.pi / 2, math.pi / 2)))
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0f}" height="{h:.0f}" '
        f'viewBox="0 0 {w:.0f} {h:.0f}">',
        f'<title>zeros of theta(q, x), q = {q:.6g}</title>',
        f'<rect x="0" y="0" width="{w:.0f}" height="{h:.0f}" fill="white"/>',
        f'<path d="{_path([complex(x0, 0), complex(x1, 0)])}" stroke="#999" stroke-width="0.8"/>',
        f'<path d="{_path([complex(0, y0), complex(0, y1)])}" stroke="#999" stroke-width="0.8"/>',
        f'<path id="katsnelson" d="{_path(kats, close=True)}" fill="none" stroke="black" stroke-width="1.2" stroke-dasharray="6,4"/>',
        f'<path id="domain-D" d="{_path(dom_d, close=True)}" fill="none" stroke="black" stroke-width="1.2"/>',
        f'<path id="half-annulus-A" d="{_path(ann, close=True)}" fill="none" stroke="black" stroke-width="1.2"/>',
    ]
    for z in sorted(zeros, key=lambda c: (c.real, c.imag)):
        if x0 <= z.real <= x1 and y0 <= z.imag <= y1:
            px, py = _px(z)
            out.append(f'<circle class="zero" cx="{px:.2f}" cy="{py:.2f}" r="3" fill="red"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

COMMANDS = {"eval": cmd_eval, "zeros": cmd_zeros, "spectrum": cmd_spectrum, "verify": cmd_verify,
            "contour": cmd_contour, "constants": cmd_constants}


def _config(a) -> CommandConfig:
    if not MIN_OUTPUT_DIGITS <= a.digits <= MAX_DIGITS:
        raise UsageError(f"--digits must lie in [{MIN_OUTPUT_DIGITS}, {MAX_DIGITS}] (arithmetic runs at >= {MIN_DIGITS}), got {a.digits}")
    qs = []
    if getattr(a, "q_grid", None):
        qs = parse_grid(a.q_grid)
    elif getattr(a, "q", None):
        qs = [parse_q(a.q)]
    x = parse_x(a.x) if getattr(a, "x", None) else None
    return CommandConfig(a.subcommand, qs, x, a.digits, getattr(a, "radius", None), a.output, a.fmt)


def _to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else v for v in r])
    return buf.getvalue()


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _attach_values(argv: list) -> list:
    """Let "--x -2.5,1" through: argparse would read a leading '-' as an option."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-"):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def run(argv=None) -> int:
    argv = _attach_values(sys.argv[1:] if argv is None else list(argv))
    try:
        a = build_parser().parse_args(argv)
        cfg = _config(a)
    except UsageError as e:
        print(f"theta-atlas: error: {e}", file=sys.stderr)
        return 2
    report = {"schema": SCHEMA_ID, "version": SCHEMA_VERSION, "command": cfg.subcommand,
              "digits": cfg.digits}
    svg = None
    try:
        out = COMMANDS[cfg.subcommand](a, cfg)
        res, (header, rows), code = out[:3]
        if len(out) > 3:
            svg = out[3]
        report["result"] = res
    except UsageError as e:
        print(f"theta-atlas: error: {e}", file=sys.stderr)
        return 2
    except (ThetaAtlasError, ArithmeticError) as e:
        report["error"] = {"type": type(e).__name__, "message": str(e)}
        header, rows, code = ["error", "message"], [[type(e).__name__, str(e)]], 1
    if cfg.fmt == "svg":
        if svg is None:
            _emit(json.dumps(report, indent=2) + "\n", cfg.output)
        else:
            _emit(svg, cfg.output)
    elif cfg.fmt == "csv":
        _emit(_to_csv(header, rows), cfg.output)
    else:
        _emit(json.dumps(report, indent=2) + "\n", cfg.output)
    return code


def load_schema() -> dict:
    from importlib.resources import files
    return json.loads(files("theta_atlas").joinpath("schema/report.schema.json").read_text(encoding="utf-8"))


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
