"""Command-line front end.

Exit codes: 0 success, 2 bad usage or parameters, 3 predicted and computed
global dimensions disagree, 4 a property check failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

from .algcore import category_algebra
from .catbuild import KINDS, Species, SpeciesError, build_category
from .exactlinalg import FieldSpec
from .groups import GroupTableError, builtin_group, group_from_json
from .homres import (
    FreeResolution,
    RegimeError,
    global_dimension,
    minimal_resolution,
)
from .properties import run_suite
from .repmod import (
    ModuleError,
    builtin_simples,
    module_from_json,
    representable_projective,
    simple_module,
)

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_PROPERTY = 0, 2, 3, 4

SPECIES_NAMES = [k.lower() for k in KINDS]
TABLE_CHARS = (0, 2, 3, 5)


class UsageError(Exception):
    pass


@dataclass
class JobSpec:
    species: Species
    n: int
    field: FieldSpec
    bound: int
    headroom: int
    fmt: str
    seed: int

    @property
    def category(self):
        return build_category(self.species, self.n)


def _group(args):
    if args.group_file:
        return group_from_json(args.group_file)
    if args.group:
        return builtin_group(args.group)
    return None


def _field(text: str) -> FieldSpec:
    try:
        return FieldSpec(int(text))
    except ValueError as exc:
        raise UsageError(f"--char: {exc}") from exc


def job_from_args(args) -> JobSpec:
    if args.species is None:
        raise UsageError("--species is required")
    if args.n is None or args.n < 0:
        raise UsageError("--n must be given and >= 0")
    kind = args.species.lower()
    if kind in ("fi_g", "oi_g") and not (args.group or args.group_file):
        raise UsageError(f"{kind} needs --group or --group-file")
    if kind in ("fi_d", "oi_d") and args.d is None:
        raise UsageError(f"{kind} needs --d")
    q = args.q if args.q is not None else (2 if kind == "vi" else None)
    species = Species.parse(kind, _group(args), args.d, q)
    bound = args.n + 4 if args.bound is None else args.bound
    if bound < args.n:
        raise UsageError("--bound must be at least n")
    return JobSpec(species, args.n, _field(args.char), bound, args.headroom, args.format, args.seed)


# -- rendering -----------------------------------------------------------------

def _render_rows(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2, sort_keys=True) + "\n"
    if not rows:
        return ""
    keys = list(rows[0])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    lines = ["| " + " | ".join(keys) + " |", "|" + "---|" * len(keys)]
    for r in rows:
        lines.append("| " + " | ".join(str(r[k]) for k in keys) + " |")
    return "\n".join(lines) + "\n"


# -- commands ----------------------------------------------------------------

def cmd_enumerate(job: JobSpec, out) -> int:
    C = job.category
    A = category_algebra(C, job.field)
    rows = []
    for b in C.objects:
        for a in range(b + 1):
            rows.append({"source": a, "target": b, "hom_size": len(C.hom[(a, b)])})
    auts = [len(C.hom[(x, x)]) for x in C.objects]
    if job.fmt == "json":
        doc = {"species": C.species.label, "params": C.species.params(), "n": C.n,
               "objects": list(C.objects), "aut_orders": auts, "homs": rows, "total_dim": A.dim}
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    if job.fmt == "md":
        out.write(f"# {C.species.label}, n = {C.n}\n\n")
        out.write(f"objects: {', '.join(str(x) for x in C.objects)}\n\n")
        out.write(_render_rows([{"object": x, "aut_order": o} for x, o in enumerate(auts)], "md") + "\n")
    out.write(_render_rows(rows, job.fmt))
    if job.fmt == "md":
        out.write(f"\ntotal dim: {A.dim}\n")
    return EXIT_OK


def _gldim_row(report) -> dict:
    return {
        "species": report.species.label,
        "n": report.n,
        "field": str(report.field),
        "predicted": report.predicted_str(),
        "computed": report.computed_str(),
        "criterion": report.criterion.holds,
        "agrees": report.agrees,
    }


def cmd_gldim(job: JobSpec, out) -> int:
    rep = global_dimension(job.category, job.field, job.bound)
    if job.fmt == "json":
        out.write(json.dumps(rep.to_json(), indent=2, sort_keys=True) + "\n")
    else:
        out.write(_render_rows([_gldim_row(rep)], job.fmt))
        if job.fmt == "md":
            crit = rep.criterion.to_json()["objects"]
            out.write("\n" + _render_rows(crit, "md"))
    return EXIT_OK if rep.agrees else EXIT_MISMATCH


def table_species(args) -> list[Species]:
    """The species named on the command line, or the full default grid."""
    kinds = [args.species.lower()] if args.species else SPECIES_NAMES
    groups = [args.group] if args.group else ["c2", "c3"]
    if args.group_file:
        groups = [group_from_json(args.group_file)]
    ds = [args.d] if args.d is not None else [1, 2]
    qs = [args.q] if args.q is not None else [2]
    out = []
    for kind in kinds:
        if kind in ("fi_g", "oi_g"):
            out += [Species.parse(kind, g) for g in groups]
        elif kind in ("fi_d", "oi_d"):
            out += [Species.parse(kind, d=d) for d in ds]
        elif kind == "vi":
            out += [Species.parse(kind, q=q) for q in qs]
        else:
            out.append(Species.parse(kind))
    return out


def cmd_table(args, out) -> int:
    if args.n is None or args.n < 0:
        raise UsageError("--n (largest n in the table) must be given and >= 0")
    if args.n > 4:
        raise UsageError("table is limited to n <= 4")
    chars = TABLE_CHARS if args.char is None else tuple(int(c) for c in args.char.split(","))
    fields = [_field(str(c)) for c in chars]
    rows, ok = [], True
    for sp in table_species(args):
        for n in range(args.n + 1):
            for F in fields:
                bound = n + 4 if args.bound is None else max(args.bound, n)
                rep = global_dimension(build_category(sp, n), F, bound)
                ok &= rep.agrees
                rows.append(_gldim_row(rep))
    out.write(_render_rows(rows, args.format))
    return EXIT_OK if ok else EXIT_MISMATCH


def _betti_from_free(res: FreeResolution, n: int) -> list[list[int]]:
    rows = []
    for st in res.stages:
        row = [0] * (n + 1)
        for x in st.objects:
            row[x] += 1
        rows.append(row)
    return rows


def _module_for(job: JobSpec, args):
    C, F = job.category, job.field
    if args.module_file:
        with open(args.module_file) as fh:
            return module_from_json(json.load(fh), C, F), None
    if args.x is None or not 0 <= args.x <= C.n:
        raise UsageError(f"--x must name an object 0..{C.n}")
    if args.module == "representable":
        return representable_projective(C, F, args.x), None
    simples = builtin_simples(C, F, args.x)
    if not 0 <= args.character < len(simples):
        raise UsageError(f"--character must be in 0..{len(simples) - 1} for object {args.x}")
    label, W = simples[args.character]
    return simple_module(C, F, args.x, W), args.x


def cmd_resolve(job: JobSpec, args, out) -> int:
    V, simple_at = _module_for(job, args)
    max_len = job.n + 2 if args.max_len is None else args.max_len
    status = EXIT_OK
    if args.mode == "minimal":
        try:
            res = minimal_resolution(V, max_len)
        except RegimeError as exc:
            raise UsageError(f"{exc} (rerun with --mode free)") from exc
        table = res.betti()
        rows = table.rows
        doc = res.to_json()
        if simple_at is not None:
            linear = table.is_linear(simple_at) and res.length == job.n - simple_at
            doc["linear"] = linear
            if not linear:
                status = EXIT_PROPERTY
    else:
        res = FreeResolution(V, seed=job.seed).ensure(max_len + 1)
        rows = _betti_from_free(res, job.n)
        doc = res.to_json()
    if job.fmt == "json":
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        width = job.n + 1
        records = [{"s": s, **{str(x): row[x] for x in range(width)}} for s, row in enumerate(rows)]
        if not records:
            records = [{"s": 0, **{str(x): 0 for x in range(width)}}]
        out.write(_render_rows(records, job.fmt))
    if status != EXIT_OK:
        print("resolution of a simple is not linear of the expected length", file=sys.stderr)
    return status


def cmd_verify(job: JobSpec, args, out) -> int:
    rep = run_suite(job.category, job.field, seed=job.seed, samples=args.samples,
                    headroom=job.headroom, bound=job.bound)
    if job.fmt == "json":
        out.write(rep.dumps() + "\n")
    else:
        rows = [{"property": r.name, "status": r.status, "checked": r.checked, "detail": r.detail}
                for r in rep.results]
        out.write(_render_rows(rows, job.fmt))
    return EXIT_OK if rep.passed else EXIT_PROPERTY


# -- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eicat", description="Homological computations for EI-category algebras.")
    p.add_argument("command", choices=["enumerate", "gldim", "table", "resolve", "verify"])
    p.add_argument("--species", choices=SPECIES_NAMES, type=str.lower)
    p.add_argument("--group", help="built-in group: c1..c6, s3, klein")
    p.add_argument("--group-file", help="JSON multiplication table")
    p.add_argument("--d", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--char", default=None, help="0 or a prime (default 0); for table a comma list")
    p.add_argument("--bound", type=int, help="projective dimension bound (default n+4)")
    p.add_argument("--headroom", type=int, default=2, help="extra truncation levels for lift checks")
    p.add_argument("--format", choices=["md", "json", "csv"], default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=20, help="random modules per verify check")
    p.add_argument("--module", choices=["simple", "representable"], default="simple")
    p.add_argument("--module-file", help="JSON module dump to resolve")
    p.add_argument("--x", type=int, help="object for --module")
    p.add_argument("--character", type=int, default=0, help="index into the built-in characters of Aut(x)")
    p.add_argument("--mode", choices=["minimal", "free"], default="minimal")
    p.add_argument("--max-len", type=int)
    return p


DEFAULT_FORMAT = {"enumerate": "md", "gldim": "md", "table": "md", "resolve": "csv", "verify": "json"}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    args.format = args.format or DEFAULT_FORMAT[args.command]
    try:
        if args.command == "table":
            return cmd_table(args, out)
        if args.char is None:
            args.char = "0"
        job = job_from_args(args)
        if args.command == "enumerate":
            return cmd_enumerate(job, out)
        if args.command == "gldim":
            return cmd_gldim(job, out)
        if args.command == "resolve":
            return cmd_resolve(job, args, out)
        return cmd_verify(job, args, out)
    except (UsageError, SpeciesError, GroupTableError, ModuleError, ValueError, OSError) as exc:
        print(f"eicat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
