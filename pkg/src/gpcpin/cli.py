"""Command-line front end.

Exit status: 0 success, 1 validation error, 2 missing data (file or catalog).
Errors are written to stderr as JSON with a machine-readable ``reason``.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, _json
from .catalog import CatalogError, CatalogLibrary, Setting, default_catalog_dir, load_catalog
from .oracle import extremal_spectrum, sample_spectra, validate_catalog
from .pinning import analyze
from .qparam import q_report
from .spectra import TOL_NORM, TOL_ORDER, SpectrumError, format_spectrum, load_spectrum, make_spectrum
from .truncation import auto_plan, bound, scan, truncate

EXIT_OK, EXIT_INVALID, EXIT_MISSING = 0, 1, 2
PACKAGE_DIR = Path(__file__).parent

log = logging.getLogger("gpcpin")


class MissingData(Exception):
    def __init__(self, reason, message):
        super().__init__(message)
        self.reason = reason


def _resolve(path: str, want_dir: bool = False) -> Path:
    """Existing path as given, else the same relative path inside the package."""
    p = Path(path)
    ok = p.is_dir() if want_dir else p.is_file()
    if ok:
        return p
    if not p.is_absolute():
        alt = PACKAGE_DIR / p
        if (alt.is_dir() if want_dir else alt.is_file()):
            return alt
    raise MissingData("missing_file", f"{path} not found")


def parse_settings(text: str) -> list[Setting]:
    """``"3,6..3,12"``, ``"4,8 4,9 4,10"`` or ``"4,8;4,9"``."""
    out = []
    for tok in text.replace(";", " ").split():
        if ".." in tok:
            a, b = tok.split("..")
            lo, hi = Setting.parse(a), Setting.parse(b)
            if lo.n_particles != hi.n_particles:
                raise ValueError(f"range {tok!r} must keep N fixed")
            out += [Setting(lo.n_particles, d) for d in range(lo.dim, hi.dim + 1)]
        else:
            out.append(Setting.parse(tok))
    return out


def _pair(text: str) -> tuple[int, int]:
    a, b = text.split(",")
    return int(a), int(b)


def _library(args) -> CatalogLibrary:
    directory = _resolve(args.catalog, want_dir=True) if args.catalog else default_catalog_dir()
    if not Path(directory).is_dir():
        raise MissingData("missing_catalog_dir", f"catalog directory {directory} not found")
    return CatalogLibrary.from_dir(directory)


def _spectrum(args):
    setting = Setting.parse(args.setting) if args.setting else None
    partial = True if args.partial else None
    return load_spectrum(_resolve(args.spectrum), setting, partial, tol_order=args.tol_order, tol_norm=args.tol_norm)


def _metadata(args, **extra):
    meta = {"version": __version__, "command": args.command}
    for key in ("tol_order", "tol_norm", "seed", "samples", "truncate", "include_builtin"):
        if hasattr(args, key):
            meta[key] = getattr(args, key)
    meta.update(extra)
    return meta


def _prepare(args, lib):
    """Spectrum, optional truncation plan, and the catalog to analyze against."""
    spec = _spectrum(args)
    plan = None
    if args.truncate:
        if args.truncate == "auto":
            plan = auto_plan(spec, lib.settings)
            work, plan = truncate(spec, plan.r, plan.s)
        else:
            r, s = _pair(args.truncate)
            work, plan = truncate(spec, r, s)
    else:
        work = spec
    cat = lib.get(work.setting)
    if cat is None:
        raise MissingData("missing_catalog", f"no catalog for setting {work.setting}")
    return spec, work, plan, cat


def cmd_analyze(args):
    lib = _library(args)
    spec, work, plan, cat = _prepare(args, lib)
    rep = analyze(cat, work, include_builtin=args.include_builtin)
    out = {"metadata": _metadata(args, spectrum=spec.meta.get("source"), catalog_complete=cat.complete)}
    out.update(rep.as_dict())
    out["truncation"] = plan.as_dict() if plan else None
    out["bound"] = bound(rep.d_min, plan.epsilon).as_dict() if plan else None
    return out, EXIT_OK


def cmd_scan(args):
    lib = _library(args)
    spec = _spectrum(args)
    res = scan(spec, parse_settings(args.settings), lib, include_builtin=args.include_builtin)
    missing = any(why == "missing catalog" for _, why in res.skipped)
    code = EXIT_MISSING if missing else EXIT_OK
    if args.format == "tsv":
        return res.to_tsv(), code
    out = {"metadata": _metadata(args, spectrum=spec.meta.get("source"))}
    out.update(res.as_dict())
    return out, code


def cmd_qparam(args):
    lib = _library(args)
    spec, work, plan, cat = _prepare(args, lib)
    rep = q_report(cat, work, q_tol=args.q_tol)
    out = {"metadata": _metadata(args, spectrum=spec.meta.get("source"), q_tol=args.q_tol)}
    out.update(rep.as_dict())
    out["truncation"] = plan.as_dict() if plan else None
    return out, EXIT_OK


def cmd_validate(args):
    if args.catalog_file:
        cat = load_catalog(_resolve(args.catalog_file))
    else:
        if not args.setting:
            raise ValueError("validate-catalog needs --setting or --catalog-file")
        st = Setting.parse(args.setting)
        cat = _library(args).get(st)
        if cat is None:
            raise MissingData("missing_catalog", f"no catalog for setting {st}")
    rep = validate_catalog(cat, args.samples, args.seed, probe=not args.no_probe, probe_restarts=args.probe_restarts)
    out = {"metadata": _metadata(args)}
    out.update(rep.as_dict())
    return out, EXIT_OK if rep.ok else EXIT_INVALID


def cmd_oracle(args):
    st = Setting.parse(args.setting)
    if args.weights:
        w = [float(x) for x in args.weights.split(",")]
        res = extremal_spectrum(st, w, restarts=args.restarts, seed=args.seed)
        out = {"metadata": _metadata(args, weights=w, restarts=args.restarts)}
        out["spectrum"] = res.spectrum.values.tolist()
        out.update(res.diagnostics())
        return out, EXIT_OK
    spectra = sample_spectra(st, args.samples, args.seed)
    texts = []
    for i, lam in enumerate(spectra):
        sp = make_spectrum(lam, st, sort=True, tol_order=1e-10, tol_norm=1e-10,
                           meta={"comment": f"oracle sample {i} seed {args.seed}"})
        texts.append(format_spectrum(sp))
    if args.output_dir:
        d = Path(args.output_dir)
        d.mkdir(parents=True, exist_ok=True)
        for i, t in enumerate(texts):
            (d / f"sample_{i:05d}.txt").write_text(t, encoding="utf-8")
        return {"metadata": _metadata(args), "written": len(texts), "directory": str(d)}, EXIT_OK
    return "".join(texts), EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gpcpin", description="Generalized Pauli constraint pinning analysis")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, spectrum=True):
        if spectrum:
            sp.add_argument("--spectrum", required=True, help="spectrum file")
            sp.add_argument("--partial", action="store_true", help="only the leading values are listed")
            sp.add_argument("--tol-order", type=float, default=TOL_ORDER)
            sp.add_argument("--tol-norm", type=float, default=TOL_NORM)
        sp.add_argument("--setting", help="N,d (overrides the spectrum header)")
        sp.add_argument("--catalog", help=f"catalog directory (default ${'{'}GPCPIN_CATALOG_DIR{'}'} or shipped)")
        sp.add_argument("--output", "-o", help="write result here instead of stdout")

    a = sub.add_parser("analyze", help="distances of a spectrum to the GPC hyperplanes")
    common(a)
    a.add_argument("--truncate", help="'auto' or 'r,s'")
    a.add_argument("--include-builtin", action="store_true", help="let ordering/Pauli constraints enter d_min")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("scan", help="truncated analyses over several settings")
    common(s)
    s.add_argument("--settings", required=True, help="e.g. '3,6..3,12' or '4,8 4,9 4,10'")
    s.add_argument("--format", choices=["json", "tsv"], default="json")
    s.add_argument("--include-builtin", action="store_true")
    s.set_defaults(func=cmd_scan)

    q = sub.add_parser("qparam", help="Q-parameter certificates")
    common(q)
    q.add_argument("--truncate", help="'auto' or 'r,s'")
    q.add_argument("--q-tol", type=float, default=1e-14)
    q.set_defaults(func=cmd_qparam)

    v = sub.add_parser("validate-catalog", help="check a catalog against random states")
    common(v, spectrum=False)
    v.add_argument("--catalog-file", help="validate this file instead of a directory entry")
    v.add_argument("--samples", type=int, default=10_000)
    v.add_argument("--seed", type=int, required=True)
    v.add_argument("--no-probe", action="store_true", help="skip the extremal probes")
    v.add_argument("--probe-restarts", type=int, default=8)
    v.set_defaults(func=cmd_validate)

    o = sub.add_parser("oracle", help="sample spectra or probe extremal spectra")
    o.add_argument("--setting", required=True)
    o.add_argument("--seed", type=int, required=True)
    o.add_argument("--samples", type=int, default=1)
    o.add_argument("--weights", help="comma-separated weights: minimize sum w_k l_k instead of sampling")
    o.add_argument("--restarts", type=int, default=32)
    o.add_argument("--output-dir", help="one spectrum file per sample")
    o.add_argument("--output", "-o")
    o.set_defaults(func=cmd_oracle)
    return p


def _error(reason, message):
    sys.stderr.write(_json.dumps({"error": {"reason": reason, "message": message}}))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        result, code = args.func(args)
    except MissingData as exc:
        _error(exc.reason, str(exc))
        return EXIT_MISSING
    except FileNotFoundError as exc:
        _error("missing_file", str(exc))
        return EXIT_MISSING
    except CatalogError as exc:
        _error("invalid_catalog", str(exc))
        return EXIT_INVALID
    except SpectrumError as exc:
        _error("invalid_spectrum", str(exc))
        return EXIT_INVALID
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        _error("validation_error", str(exc))
        return EXIT_INVALID
    text = result if isinstance(result, str) else _json.dumps(result)
    if getattr(args, "output", None):
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
