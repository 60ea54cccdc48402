"""Configuration ingestion, pipeline orchestration over truncation sweeps,
and deterministic machine-readable reporting.

Configs are JSON documents; reports are JSON (full) or CSV (per-N
convergence table).  Identical configs produce byte-identical reports:
every float is rendered with 17 significant digits and keys are emitted
in sorted order.
"""

import argparse
import concurrent.futures
import io
import json
import os
import sys

import numpy as np

from ._errors import (
    ArgumentError,
    ConfigError,
    ConvergenceError,
    DivergenceError,
    KreinRealizeError,
)
from .scalars import Quaternion
from .linalg import QuatMatrix, adjoint, eig_backend_name, max_abs
from .seriesfn import OperatorSeries
from .gram import GramSpec, build_form_matrix, norm_bound_check
from .kreinrange import spectral_split
from .realize import (
    _resolvent_radius,
    build_model_space,
    build_realization,
    coisometry_defect,
    kernel_closed,
    kernel_reconstruct,
    kernel_synth,
    moment_check,
)

__all__ = ["RunConfig", "parse_config", "run_pipeline", "emit_report", "main"]

_KNOWN_KEYS = {
    "field",
    "dim",
    "coeffs",
    "r",
    "r0",
    "N_list",
    "cutoff",
    "coefficient_symmetry",
    "nmax",
    "grid",
    "seed",
    "out",
}

MOMENT_TOL = 1e-6
DEFECT_TOL = 1e-6
KREIN_GRAM_TOL = 1e-12
KERNEL_TOL_BASE = 10.0
KERNEL_TOL_RATE = 0.9
NORM_SAMPLES = 256
RESOLVENT_MARGIN = 0.95


class RunConfig:
    """Validated run configuration; see parse_config for the schema."""

    __slots__ = (
        "field",
        "dim",
        "coeffs",
        "r",
        "r0",
        "n_list",
        "cutoff",
        "j_c",
        "nmax",
        "grid",
        "seed",
        "out",
    )

    def __init__(self, **kw):
        for name in self.__slots__:
            object.__setattr__(self, name, kw.pop(name))
        if kw:
            raise ConfigError("unexpected config fields: %s" % sorted(kw))

    def __setattr__(self, name, value):
        raise AttributeError("RunConfig is immutable")

    def series(self):
        """The operator series of the config, with J_C applied if present."""
        coeffs = self.coeffs
        if self.j_c is not None:
            coeffs = [c @ np.diag(self.j_c) for c in coeffs]
        return OperatorSeries(coeffs, self.r0)

    def echo(self):
        """JSON-ready copy of the parsed configuration."""
        if self.field == "quaternion":
            enc = [
                [[list(c.entry(i, j).vec) for j in range(self.dim)]
                 for i in range(self.dim)]
                for c in self.coeffs
            ]
        else:
            enc = [
                [[[float(c[i, j].real), float(c[i, j].imag)]
                  for j in range(self.dim)]
                 for i in range(self.dim)]
                for c in self.coeffs
            ]
        out = {
            "field": self.field,
            "dim": self.dim,
            "coeffs": enc,
            "r": self.r,
            "r0": self.r0,
            "N_list": list(self.n_list),
            "cutoff": self.cutoff,
            "nmax": self.nmax,
            "grid": [[z.real, z.imag] for z in self.grid],
        }
        if self.j_c is not None:
            out["coefficient_symmetry"] = [int(v) for v in self.j_c]
        if self.seed is not None:
            out["seed"] = self.seed
        if self.out is not None:
            out["out"] = self.out
        return out


def _want(doc, key, path, types, default=KeyError):
    if key not in doc:
        if default is KeyError:
            raise ConfigError("%s.%s: required field is missing" % (path, key))
        return default
    value = doc[key]
    if not isinstance(value, types) or isinstance(value, bool):
        raise ConfigError(
            "%s.%s: expected %s, got %s"
            % (path, key, " or ".join(t.__name__ for t in types),
               type(value).__name__)
        )
    return value


def _parse_complex_entry(value, path):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                for v in value)
    ):
        return complex(value[0], value[1])
    raise ConfigError("%s: expected a number or [re, im]" % path)


def _parse_quat_entry(value, path):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return Quaternion(float(value))
    if (
        isinstance(value, list)
        and len(value) == 4
        and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                for v in value)
    ):
        return Quaternion(*[float(v) for v in value])
    raise ConfigError("%s: expected a number or [w, x, y, z]" % path)


def _parse_matrix(value, dim, field, path):
    if not isinstance(value, list) or len(value) != dim:
        raise ConfigError("%s: expected %d rows" % (path, dim))
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != dim:
            raise ConfigError("%s[%d]: expected %d entries" % (path, i, dim))
        if field == "quaternion":
            rows.append([
                _parse_quat_entry(v, "%s[%d][%d]" % (path, i, j))
                for j, v in enumerate(row)
            ])
        else:
            rows.append([
                _parse_complex_entry(v, "%s[%d][%d]" % (path, i, j))
                for j, v in enumerate(row)
            ])
    if field == "quaternion":
        return QuatMatrix.from_entries(rows)
    return np.array(rows, dtype=complex)


def parse_config(text):
    """Parse and validate a JSON run configuration.

    Required: field ("complex" | "quaternion"), dim, coeffs (list of
    dim x dim matrices; complex entries as numbers or [re, im],
    quaternionic as [w, x, y, z]), r, r0, N_list (ascending positive
    integers).  Optional: cutoff (default 1e-12), coefficient_symmetry (a
    list of +-1 of length dim), nmax (default 6), grid (evaluation points,
    numbers or [re, im]; defaults to multiples of r), seed, out.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError("config: not valid UTF-8 (%s)" % exc) from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config: malformed JSON (%s)" % exc) from exc
    if not isinstance(doc, dict):
        raise ConfigError("config: top level must be an object")
    unknown = sorted(set(doc) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError("config: unknown field(s) %s" % ", ".join(unknown))

    field = _want(doc, "field", "config", (str,))
    if field not in ("complex", "quaternion"):
        raise ConfigError(
            'config.field: expected "complex" or "quaternion", got %r' % field
        )
    dim = _want(doc, "dim", "config", (int,))
    if dim < 1:
        raise ConfigError("config.dim: must be >= 1, got %d" % dim)
    r = float(_want(doc, "r", "config", (int, float)))
    r0 = float(_want(doc, "r0", "config", (int, float)))
    if not 0.0 < r < r0 < 1.0:
        raise ConfigError(
            "config: need 0 < r < r0 < 1, got r = %g and r0 = %g" % (r, r0)
        )
    raw_coeffs = _want(doc, "coeffs", "config", (list,))
    if not raw_coeffs:
        raise ConfigError("config.coeffs: need at least one coefficient")
    coeffs = [
        _parse_matrix(c, dim, field, "config.coeffs[%d]" % k)
        for k, c in enumerate(raw_coeffs)
    ]
    raw_n = _want(doc, "N_list", "config", (list,))
    if not raw_n:
        raise ConfigError("config.N_list: must be nonempty")
    n_list = []
    for k, n in enumerate(raw_n):
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ConfigError(
                "config.N_list[%d]: expected a positive integer" % k
            )
        if n_list and n <= n_list[-1]:
            raise ConfigError(
                "config.N_list[%d]: values must be strictly ascending" % k
            )
        n_list.append(n)
    cutoff = float(_want(doc, "cutoff", "config", (int, float), 1e-12))
    if not 0.0 < cutoff < 1.0:
        raise ConfigError(
            "config.cutoff: must lie strictly between 0 and 1, got %g" % cutoff
        )
    nmax = _want(doc, "nmax", "config", (int,), 6)
    if nmax < 0:
        raise ConfigError("config.nmax: must be >= 0, got %d" % nmax)
    j_c = None
    if "coefficient_symmetry" in doc:
        raw_j = _want(doc, "coefficient_symmetry", "config", (list,))
        if len(raw_j) != dim:
            raise ConfigError(
                "config.coefficient_symmetry: expected %d entries, got %d"
                % (dim, len(raw_j))
            )
        for k, v in enumerate(raw_j):
            if v not in (1, -1) or isinstance(v, bool):
                raise ConfigError(
                    "config.coefficient_symmetry[%d]: entries must be 1 or -1"
                    % k
                )
        j_c = np.array(raw_j, dtype=float)
    if "grid" in doc:
        raw_grid = _want(doc, "grid", "config", (list,))
        if not raw_grid:
            raise ConfigError("config.grid: must be nonempty when present")
        grid = [
            _parse_complex_entry(z, "config.grid[%d]" % k)
            for k, z in enumerate(raw_grid)
        ]
        for k, z in enumerate(grid):
            if abs(z) >= r:
                raise ConfigError(
                    "config.grid[%d]: |z| = %g must stay below r = %g"
                    % (k, abs(z), r)
                )
            if field == "quaternion" and z.imag != 0.0:
                raise ConfigError(
                    "config.grid[%d]: quaternionic runs evaluate the kernel "
                    "at real points only" % k
                )
    else:
        grid = [complex(0.0), complex(0.3 * r), complex(0.6 * r),
                complex(0.9 * r)]
    seed = None
    if "seed" in doc:
        seed = _want(doc, "seed", "config", (int,))
    out = None
    if "out" in doc:
        out = _want(doc, "out", "config", (str,))
    return RunConfig(
        field=field,
        dim=dim,
        coeffs=coeffs,
        r=r,
        r0=r0,
        n_list=n_list,
        cutoff=cutoff,
        j_c=j_c,
        nmax=nmax,
        grid=grid,
        seed=seed,
        out=out,
    )


def _krein_gram_defect(basis):
    """max |[F_k, F_l] - s_k delta_kl| over the synthesized basis."""
    m = basis.kept
    if m == 0:
        return 0.0
    roots = np.sqrt(np.abs(basis.eigenvalues))
    weight = basis.signs / np.abs(basis.eigenvalues)
    if isinstance(basis.vectors, QuatMatrix):
        x = basis.vectors.scale_columns(roots)
        cx = basis.vectors.adjoint() @ x
        gram = cx.adjoint() @ (cx * weight[:, None])
        gram = gram - QuatMatrix(np.diag(basis.signs.astype(complex)),
                                 np.zeros((m, m), dtype=complex))
        return float(max_abs(gram))
    x = basis.vectors * roots[None, :]
    cx = adjoint(basis.vectors) @ x
    gram = adjoint(cx) @ (cx * weight[:, None])
    gram = gram - np.diag(basis.signs.astype(complex))
    return float(max_abs(gram))


def _kernel_record(cfg, series, model, real, n):
    sharp = series.sharp()
    radius = _resolvent_radius(real)
    pairs_used = 0
    worst = 0.0
    scale = 1.0
    for z in cfg.grid:
        for w in cfg.grid:
            if max(abs(z), abs(w)) * radius >= RESOLVENT_MARGIN:
                continue
            pairs_used += 1
            if cfg.field == "quaternion":
                closed = kernel_closed(sharp, z.real, w.real, terms=n)
                synth = kernel_synth(model, z.real, w.real)
                recon = kernel_reconstruct(real, z.real, w.real)
            else:
                closed = kernel_closed(sharp, z, w)
                synth = kernel_synth(model, z, w)
                recon = kernel_reconstruct(real, z, w)
            scale = max(scale, float(max_abs(closed)))
            worst = max(
                worst,
                float(max_abs(closed - synth)),
                float(max_abs(closed - recon)),
                float(max_abs(synth - recon)),
            )
    tol = KERNEL_TOL_BASE * KERNEL_TOL_RATE ** (2 * n) * scale
    return {
        "max_discrepancy": worst,
        "tolerance": tol,
        "pairs_used": pairs_used,
        "scale": scale,
    }


def _run_single(cfg, n):
    series = cfg.series()
    spec = GramSpec(series, cfg.r, n)
    gram = build_form_matrix(spec)
    basis = spectral_split(gram.ptilde, cfg.cutoff)
    model = build_model_space(basis, spec)
    real = build_realization(model, basis)
    errors = moment_check(real, series, cfg.nmax)
    defect = coisometry_defect(real, cfg.nmax)
    kernel = _kernel_record(cfg, series, model, real, n)
    bound = norm_bound_check(spec, NORM_SAMPLES)
    gram_defect = _krein_gram_defect(basis)
    moment_max = max(errors)
    assertions = [
        {
            "name": "moment_identity",
            "value": moment_max,
            "tolerance": MOMENT_TOL,
            "passed": bool(moment_max <= MOMENT_TOL),
        },
        {
            "name": "coisometry_observable",
            "value": defect.observable,
            "tolerance": DEFECT_TOL,
            "passed": bool(defect.observable <= DEFECT_TOL),
        },
        {
            "name": "kernel_three_way",
            "value": kernel["max_discrepancy"],
            "tolerance": kernel["tolerance"],
            "passed": bool(kernel["max_discrepancy"] <= kernel["tolerance"]),
        },
        {
            "name": "krein_gram",
            "value": gram_defect,
            "tolerance": KREIN_GRAM_TOL,
            "passed": bool(gram_defect <= KREIN_GRAM_TOL),
        },
        {
            "name": "norm_bound",
            "value": bound.estimate,
            "tolerance": bound.bound,
            "passed": bool(bound.passed),
        },
    ]
    return {
        "n_trunc": n,
        "signature": list(basis.signature),
        "moment_errors": errors,
        "moment_max": moment_max,
        "coisometry": {
            "observable": defect.observable,
            "raw": defect.raw,
            "k_order": cfg.nmax,
        },
        "kernel": kernel,
        "norm_bound": {
            "estimate": bound.estimate,
            "bound": bound.bound,
            "max_phi": bound.max_phi,
        },
        "krein_gram_defect": gram_defect,
        "warnings": list(basis.warnings),
        "assertions": assertions,
    }


def _annotated(exc, n):
    try:
        clone = type(exc)("N=%d: %s" % (n, exc))
    except TypeError:
        return exc
    return clone


def _thread_budget(n_jobs):
    raw = os.environ.get("KREIN_REALIZE_THREADS")
    if raw is None or raw == "":
        return min(n_jobs, os.cpu_count() or 1)
    try:
        cap = int(raw)
    except ValueError:
        raise ConfigError(
            "KREIN_REALIZE_THREADS: expected a positive integer, got %r" % raw
        ) from None
    if cap < 1:
        raise ConfigError(
            "KREIN_REALIZE_THREADS: expected a positive integer, got %r" % raw
        )
    return min(n_jobs, cap)


def run_pipeline(cfg):
    """Run build -> split -> realize -> verify for every N in the sweep.

    N values execute independently (threaded, capped by the
    KREIN_REALIZE_THREADS environment variable); the report lists records
    in N order regardless of completion order.  Module errors are
    re-raised annotated with the N at which they occurred.
    """
    workers = _thread_budget(len(cfg.n_list))

    def job(n):
        try:
            return _run_single(cfg, n)
        except KreinRealizeError as exc:
            raise _annotated(exc, n) from exc

    if workers == 1:
        records = [job(n) for n in cfg.n_list]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(job, cfg.n_list))
    passed = all(a["passed"] for rec in records for a in rec["assertions"])
    return {
        "config": cfg.echo(),
        "environment": {
            "eig_backend": eig_backend_name(),
            "threads": workers,
        },
        "records": records,
        "passed": passed,
    }


def _format_float(x):
    if x != x:
        return "NaN"
    if x in (float("inf"), float("-inf")):
        return "Infinity" if x > 0 else "-Infinity"
    return "%.17g" % x


def _serialize(obj, out):
    if isinstance(obj, dict):
        out.write("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.write(",")
            out.write(json.dumps(str(key)))
            out.write(":")
            _serialize(obj[key], out)
        out.write("}")
    elif isinstance(obj, (list, tuple)):
        out.write("[")
        for i, item in enumerate(obj):
            if i:
                out.write(",")
            _serialize(item, out)
        out.write("]")
    elif isinstance(obj, bool):
        out.write("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.write(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.write(_format_float(float(obj)))
    elif obj is None:
        out.write("null")
    elif isinstance(obj, str):
        out.write(json.dumps(obj))
    else:
        raise ArgumentError("cannot serialize %r" % type(obj).__name__)


def emit_report(report, fmt="json"):
    """Serialize a report deterministically; returns bytes.

    JSON renders the full report with sorted keys and 17-significant-digit
    floats, so identical reports serialize byte-identically.  CSV renders
    the per-N convergence table only.
    """
    if fmt == "json":
        buf = io.StringIO()
        _serialize(report, buf)
        buf.write("\n")
        return buf.getvalue().encode("utf-8")
    if fmt != "csv":
        raise ArgumentError('format must be "json" or "csv", got %r' % fmt)
    records = report["records"]
    n_errors = max(len(rec["moment_errors"]) for rec in records) if records else 0
    header = ["n_trunc", "n_plus", "n_minus", "n_zero"]
    header += ["moment_e%d" % i for i in range(n_errors)]
    header += [
        "coisometry_observable",
        "coisometry_raw",
        "kernel_max",
        "kernel_tol",
        "norm_estimate",
        "norm_bound",
        "krein_gram_defect",
        "passed",
    ]
    lines = [",".join(header)]
    for rec in records:
        row = [str(rec["n_trunc"])]
        row += [str(v) for v in rec["signature"]]
        errs = list(rec["moment_errors"])
        errs += [float("nan")] * (n_errors - len(errs))
        row += [_format_float(float(v)) for v in errs]
        row.append(_format_float(rec["coisometry"]["observable"]))
        row.append(_format_float(rec["coisometry"]["raw"]))
        row.append(_format_float(rec["kernel"]["max_discrepancy"]))
        row.append(_format_float(rec["kernel"]["tolerance"]))
        row.append(_format_float(rec["norm_bound"]["estimate"]))
        row.append(_format_float(rec["norm_bound"]["bound"]))
        row.append(_format_float(rec["krein_gram_defect"]))
        row.append("true" if all(a["passed"] for a in rec["assertions"])
                   else "false")
        lines.append(",".join(row))
    return ("\n".join(lines) + "\n").encode("utf-8")


def main(argv=None):
    """Entry point: realize --config <path> [--format json|csv] [--out <path>].

    Exit codes: 0 all assertions passed, 1 assertion failure, 2 config
    error, 3 numerical failure.
    """
    parser = argparse.ArgumentParser(
        prog="realize",
        description="Build and verify coisometric Krein-space realizations "
                    "of an operator series.",
    )
    parser.add_argument("--config", required=True,
                        help="path to a JSON run configuration")
    parser.add_argument("--format", choices=("json", "csv"), default="json",
                        help="report format (default json)")
    parser.add_argument("--out", default=None,
                        help="report destination (default: config 'out' "
                             "field, else stdout)")
    args = parser.parse_args(argv)
    try:
        with open(args.config, "rb") as handle:
            text = handle.read()
    except OSError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    try:
        cfg = parse_config(text)
        report = run_pipeline(cfg)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except (ConvergenceError, DivergenceError, np.linalg.LinAlgError) as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return 3
    except KreinRealizeError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3
    payload = emit_report(report, args.format)
    dest = args.out if args.out is not None else cfg.out
    if dest is None or dest == "-":
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    else:
        try:
            with open(dest, "wb") as handle:
                handle.write(payload)
        except OSError as exc:
            print("output error: %s" % exc, file=sys.stderr)
            return 2
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
