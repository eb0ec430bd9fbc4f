"""``hdxwalk`` command line: generate complexes and emit JSON verification reports.

Exit codes: 0 every check passed, 1 some check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import re
import sys
import time
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from . import __version__
from .cochains import Cochain, project_C0
from .complex import validate
from .decomposition import SOLVERS, decompose, verify_decomposition
from .errors import ComplexError, GenerationError, MixingBoundViolation
from .generators import GeneratorSpec, complete_complex, generate
from .io import (
    cochain_from_json,
    complex_to_json,
    digest,
    dumps,
    faceset_from_json,
    faceset_to_json,
    load_complex,
    read_json,
)
from .mixing import THEOREM_ALIASES, THEOREMS, check_binary_mixing, check_mixing_bounds, second_eigenvalue_on_C0
from .operators import assemble_upper_walk, dump_operator, operator, verify_factorizations
from .spectra import check_descent, profile
from .suite import DEFAULT_SEED, fixture_metadata, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FACTOR_TOL = 1e-10
LADDER_TOL = 1e-8
OPS = {"upper": "upper", "lower": "lower", "nonlazy": "nonlazy", "d": "d", "dstar": "dstar"}


class UsageError(Exception):
    pass


class Run:
    """Collects the manifest for one invocation."""

    def __init__(self, command: str, args: dict):
        self.command = command
        self.args = args
        self.inputs: list[dict] = []
        self.seeds: list[int] = []
        self.summary: dict[str, bool] = {}
        self.t0 = time.perf_counter()

    def add_input(self, role: str, doc) -> None:
        self.inputs.append({"role": role, "digest": digest(doc)})

    def check(self, name: str, passed: bool) -> None:
        self.summary[name] = bool(self.summary.get(name, True) and passed)

    @property
    def ok(self) -> bool:
        return all(self.summary.values())

    def elapsed(self) -> float:
        return time.perf_counter() - self.t0

    def manifest(self, timed: bool = True) -> dict:
        out = {
            "command": self.command,
            "arguments": self.args,
            "inputs": self.inputs,
            "seeds": self.seeds,
            "tool_version": f"hdxwalk {__version__}",
            "checks": self.summary,
            "all_pass": self.ok,
        }
        if timed:
            out["wall_clock_seconds"] = self.elapsed()
        return out


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _report(run: Run, body: dict, path: str | None) -> int:
    _emit(dumps({"manifest": run.manifest(), **body}), path)
    for name, passed in run.summary.items():
        if not passed:
            print(f"FAIL {name}", file=sys.stderr)
    return EXIT_OK if run.ok else EXIT_FAIL


def _load(run: Run, path: str):
    X, m, doc = load_complex(path)
    run.add_input("complex", doc)
    return X, m


# -- subcommands ----------------------------------------------------------------

def cmd_gen(a: argparse.Namespace) -> int:
    params: dict = {}
    if a.kind in ("complete", "random-pure"):
        if a.m is None or a.n is None:
            raise UsageError(f"--kind {a.kind} needs --m and --n")
        params = {"m": a.m, "n": a.n}
        if a.kind == "random-pure":
            params["p"] = a.p
    else:
        if a.v is None or a.s is None:
            raise UsageError("--kind regular-graph-matching needs --v and --s")
        params = {"v": a.v, "s": a.s, "dim": a.dim}
    spec = GeneratorSpec(a.kind, params, a.seed if a.kind != "complete" else 0)
    out = generate(spec)
    m, meta = out[1], out[-1]
    doc = complex_to_json(m, metadata=meta)
    _emit(dumps(doc), a.output)
    if a.kind == "regular-graph-matching" and a.set_output:
        Path(a.set_output).write_text(dumps(faceset_to_json(out[2])))
    return EXIT_OK


def cmd_validate(a: argparse.Namespace) -> int:
    run = Run("validate", {})
    X, m = _load(run, a.complex)
    rep = validate(X, m)
    run.check("validate", rep.ok)
    if not rep.ok:
        print(f"max residual {rep.max_residual()!r}", file=sys.stderr)
    return _report(run, {"validation": rep.to_json()}, a.output)


def _parse_sweep(text: str) -> tuple[str, list[int]]:
    mt = re.fullmatch(r"(m)=(\d+)\.\.(\d+)", text.strip())
    if not mt:
        raise UsageError(f"--sweep expects m=LO..HI, got {text!r}")
    lo, hi = int(mt.group(2)), int(mt.group(3))
    if lo > hi:
        raise UsageError(f"empty sweep range {text!r}")
    return mt.group(1), list(range(lo, hi + 1))


def _sweep_csv(values: list[int], n: int) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "n", "k", "mu_k", "nu_k", "upper_second_eigenvalue", "lazy_bound", "lambda_one_sided"])
    for mm in values:
        m = complete_complex(mm, n)[1]
        prof = profile(m)
        lam = prof.lambda_one_sided
        for k in range(n):
            top = second_eigenvalue_on_C0(assemble_upper_walk(m, k)).top
            bound = (k + 1) / (k + 2) + (k + 1) * lam
            w.writerow([mm, n, k, repr(prof.mu[k]), repr(prof.nu[k]), repr(top), repr(bound), repr(lam)])
    return buf.getvalue()


def cmd_spectra(a: argparse.Namespace) -> int:
    if a.sweep:
        if a.complex:
            raise UsageError("--sweep builds complete complexes; do not pass a complex file")
        if a.n is None:
            raise UsageError("--sweep needs --n")
        _, values = _parse_sweep(a.sweep)
        if values[0] < a.n + 1:
            raise UsageError(f"sweep needs m >= n+1 = {a.n + 1}")
        _emit(_sweep_csv(values, a.n), a.output)
        return EXIT_OK
    if not a.complex:
        raise UsageError("spectra needs a complex file or --sweep")
    run = Run("spectra", {})
    _, m = _load(run, a.complex)
    prof = profile(m)
    desc = check_descent(prof)
    run.check("descent", desc.ok)
    return _report(run, {"profile": prof.to_json(), "descent": desc.to_json()}, a.output)


def cmd_walk(a: argparse.Namespace) -> int:
    run = Run("walk", {"k": a.k, "op": a.op})
    X, m = _load(run, a.complex)
    op = operator(m, OPS[a.op], a.k)
    body: dict = {"operator": {"kind": op.kind, "k": op.k, "shape": list(op.shape)}}
    if op.kind in ("upper", "lower", "nonlazy"):
        body["operator"]["eigenvalues"] = op.eigenvalues()
        rows = op.dense().sum(axis=1)
        body["operator"]["row_sum_residual"] = float(np.max(np.abs(rows - 1.0)))
    # factorization identities at the source dimension of d / d*, or at k for walks
    fk = a.k + 1 if a.op == "dstar" else a.k
    if 0 <= fk <= X.n:
        rep = verify_factorizations(m, fk)
        body["factorizations"] = rep.to_json()
        run.check("factorizations", rep.max_residual() <= FACTOR_TOL)
    if a.dump:
        mat, leg = dump_operator(op, a.dump)
        body["dump"] = {"matrix": mat.name, "legend": leg.name}
    return _report(run, body, a.output)


def cmd_decompose(a: argparse.Namespace) -> int:
    run = Run("decompose", {"k": a.k, "solver": a.solver})
    X, m = _load(run, a.complex)
    prof = profile(m)
    phis = []
    if a.cochain:
        doc = read_json(a.cochain)
        run.add_input("cochain", doc)
        phi = cochain_from_json(doc, m)
        if phi.k != a.k:
            raise UsageError(f"cochain has k={phi.k}, but --k {a.k}")
        phis.append(phi)
    else:
        run.seeds.append(a.seed)
        rng = np.random.default_rng(a.seed)
        phis = [project_C0(Cochain.random(m, a.k, rng)) for _ in range(a.random)]
    ladders = []
    rng = np.random.default_rng(a.seed)
    for phi in phis:
        res = decompose(phi, solver=a.solver, rng=rng)
        rep = verify_decomposition(res, prof, tol=LADDER_TOL)
        run.check("identity1", rep.identity1_residual <= LADDER_TOL)
        run.check("identity2", rep.identity2_residual <= LADDER_TOL)
        run.check("ladder_lower", rep.cor_lower_pass)
        run.check("ladder_upper", rep.cor_upper_pass)
        ladders.append(rep.to_json())
    return _report(run, {"ladders": ladders}, a.output)


def _theorems(text: str | None) -> list[str]:
    if text is None:
        return ["lazy", "nonlazy_two_sided", "nonlazy_one_sided"]
    out = []
    for t in text.split(","):
        t = t.strip()
        t = THEOREM_ALIASES.get(t, t)
        if t not in THEOREMS:
            raise UsageError(f"unknown theorem {t!r}; use {', '.join([*THEOREMS, *THEOREM_ALIASES])}")
        out.append(t)
    return out


def cmd_mixing(a: argparse.Namespace) -> int:
    run = Run("mixing", {"theorems": a.theorems, "lambda_override": a.lambda_override})
    X, m = _load(run, a.complex)
    wanted = _theorems(a.theorems)
    override = None
    if a.lambda_override is not None:
        parts = [float(x) for x in a.lambda_override.split(",")]
        override = (parts[0], parts[-1])
    prof = profile(m)
    body: dict = {}
    spectral = [t for t in wanted if t != "binary"]
    if spectral:
        try:
            rep = check_mixing_bounds(prof, spectral, lambda_override=override)
        except MixingBoundViolation as exc:
            print(f"FAIL {exc}", file=sys.stderr)
            run.check("lazy", False)
            return _report(run, {"error": str(exc)}, a.output)
        body["report"] = rep.to_json()
        for r in rep.records:
            if not r.advisory:
                run.check(r.theorem_id, r.passed)
            elif not r.passed:
                print(f"advisory bound exceeded: {r.theorem_id} k={r.k}", file=sys.stderr)
    if "binary" in wanted:
        if not a.set:
            raise UsageError("the binary bound needs --set FILE")
        doc = read_json(a.set)
        run.add_input("face_set", doc)
        A = faceset_from_json(doc, m)
        b = check_binary_mixing(A, prof, None if override is None else override[0])
        body["binary"] = {"theorem_id": "binary", "k": A.k, **b.to_json()}
        run.check("binary", b.passed)
    return _report(run, body, a.output)


def cmd_suite(a: argparse.Namespace) -> int:
    criteria = None
    if a.criteria:
        try:
            criteria = [int(c) for c in a.criteria.split(",")]
        except ValueError as exc:
            raise UsageError(f"--criteria expects integers, got {a.criteria!r}") from exc
    run = Run("suite", {"criteria": criteria})
    run.seeds.append(a.seed)
    results = run_suite(a.seed, criteria)
    for r in results:
        run.check(f"criterion_{r.cid}", r.passed)
        print(f"{'PASS' if r.passed else 'FAIL'} criterion {r.cid}: {r.title}", file=sys.stderr)
        for note in r.notes:
            print(f"     {note}", file=sys.stderr)
    body = {
        "criteria": [r.to_json() for r in results],
        "fixtures": fixture_metadata(),
    }
    # the report stays byte-identical across runs; timing goes to a sidecar
    text = dumps({"manifest": run.manifest(timed=False), **body})
    _emit(text, a.output)
    elapsed = run.elapsed()
    print(f"wall clock {elapsed:.2f} s", file=sys.stderr)
    if a.output:
        Path(a.output + ".timing.json").write_text(dumps({"wall_clock_seconds": elapsed}))
    return EXIT_OK if run.ok else EXIT_FAIL


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hdxwalk", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"hdxwalk {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a complex")
    g.add_argument("--kind", required=True, choices=["complete", "random-pure", "regular-graph-matching"])
    g.add_argument("--m", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--p", type=float, default=0.6)
    g.add_argument("--v", type=int)
    g.add_argument("--s", type=int)
    g.add_argument("--dim", type=int, default=2, choices=[1, 2])
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.add_argument("--set-output", help="write the matching (regular-graph-matching only)")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("validate", help="check closure, purity and the weight recursion")
    v.add_argument("complex")
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("spectra", help="per-link spectra, classification and descent")
    s.add_argument("complex", nargs="?")
    s.add_argument("--sweep", help="m=LO..HI over complete complexes, CSV output")
    s.add_argument("--n", type=int)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_spectra)

    w = sub.add_parser("walk", help="assemble an operator and check its factorizations")
    w.add_argument("complex")
    w.add_argument("--k", type=int, required=True)
    w.add_argument("--op", required=True, choices=sorted(OPS))
    w.add_argument("--dump", metavar="PREFIX")
    w.add_argument("-o", "--output")
    w.set_defaults(func=cmd_walk)

    d = sub.add_parser("decompose", help="run the ladder decomposition")
    d.add_argument("complex")
    d.add_argument("--k", type=int, required=True)
    src = d.add_mutually_exclusive_group()
    src.add_argument("--cochain")
    src.add_argument("--random", type=int, default=1)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--solver", choices=SOLVERS, default="pinv")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_decompose)

    x = sub.add_parser("mixing", help="compare walk spectra with the mixing bounds")
    x.add_argument("complex")
    x.add_argument("--theorems", help="comma list of " + ", ".join([*THEOREMS, *THEOREM_ALIASES]))
    x.add_argument("--set", help="face-set JSON for the binary bound")
    x.add_argument("--lambda-override", help="LAMBDA or ONE_SIDED,TWO_SIDED")
    x.add_argument("-o", "--output")
    x.set_defaults(func=cmd_mixing)

    t = sub.add_parser("suite", help="run the full verification battery")
    t.add_argument("--seed", type=int, default=DEFAULT_SEED)
    t.add_argument("--criteria", help="comma list of criterion numbers")
    t.add_argument("-o", "--output")
    t.set_defaults(func=cmd_suite)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ComplexError, GenerationError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
