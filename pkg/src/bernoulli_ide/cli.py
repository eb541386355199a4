"""Command-line front end.

Exit status: 0 success, 1 problem-file or validation error, 2 solver error.
Reports go to standard output; elapsed time goes to standard error so that
stdout and the CSV files are byte-identical across runs.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass

import numpy as np

from .basis import MAX_DEGREE, orthonormal_basis
from .errors import BasisError, ExprError, IdeError, ProblemError
from .opmat import theta
from .problemfile import BUILTIN, ProblemFile, builtin_text, load_builtin, load_problem
from .project import sample
from .solver import SpectralSolution, convergence_sweep, solve

SAMPLE_POINTS = 201


class UsageError(IdeError):
    pass


@dataclass(frozen=True)
class RunReport:
    name: str
    n: int
    coefficients: tuple[float, ...]
    max_error: float | None
    max_residual: float
    condition_estimate: float
    elapsed_ms: float

    def render(self) -> str:
        lines = [
            f"problem: {self.name}",
            f"n: {self.n}",
            f"degree: {len(self.coefficients) - 1}",
            "coefficients (y = sum c_i x^i):",
        ]
        lines += [f"  c_{i} = {_g12(c)}" for i, c in enumerate(self.coefficients)]
        lines.append("max_error: " + ("n/a" if self.max_error is None else f"{self.max_error:.6e}"))
        lines.append(f"max_residual: {self.max_residual:.6e}")
        lines.append(f"condition_estimate: {self.condition_estimate:.6e}")
        return "\n".join(lines) + "\n"


def _g12(v: float) -> str:
    return f"{v + 0.0:.12g}"  # + 0.0 folds -0.0


def _num(v: float) -> str:
    return repr(float(v) + 0.0)


def report_for(name: str, sol: SpectralSolution) -> RunReport:
    d = sol.diagnostics
    return RunReport(name, sol.n, sol.y_poly.coeffs, d.max_error, d.max_residual, d.condition_estimate, sol.elapsed_ms)


def _writer(buf) -> csv.writer:
    return csv.writer(buf, lineterminator="\n")


def samples_csv(pf: ProblemFile, sol: SpectralSolution, points: int = SAMPLE_POINTS) -> str:
    x = np.linspace(0.0, 1.0, points)
    y = sol(x)
    buf = io.StringIO()
    w = _writer(buf)
    exact = pf.problem.exact
    if exact is None:
        w.writerow(["x", "y_approx"])
        for xi, yi in zip(x, y):
            w.writerow([_num(xi), _num(yi)])
    else:
        ye = sample(exact, x)
        w.writerow(["x", "y_approx", "y_exact", "abs_err"])
        for xi, yi, ei in zip(x, y, ye):
            w.writerow([_num(xi), _num(yi), _num(ei), _num(abs(yi - ei))])
    return buf.getvalue()


def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _run_solve(pf: ProblemFile, n: int | None, out: str | None, method: str, reconstruction: str) -> int:
    n = pf.n if n is None else n
    if n < pf.problem.order:
        raise UsageError(f"n={n} is below the problem order k={pf.problem.order}")
    sol = solve(pf.problem, n, method=method, reconstruction=reconstruction)
    report = report_for(pf.problem.name, sol)
    sys.stdout.write(report.render())
    path = out or f"{pf.problem.name}_samples.csv"
    _write(samples_csv(pf, sol), path)
    print(f"elapsed_ms: {report.elapsed_ms:.3f}", file=sys.stderr)
    return 0


def sweep_csv(pf: ProblemFile, n_list, method: str = "auto") -> tuple[str, bool]:
    rows = convergence_sweep(pf.problem, n_list, method)
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(["n", "max_error", "max_residual", "status"])
    ok = True
    for row in rows:
        if row.failure:
            ok = False
            w.writerow([row.n, "", "", row.failure])
        else:
            err = "" if row.max_error is None else _num(row.max_error)
            w.writerow([row.n, err, _num(row.max_residual), "ok"])
    return buf.getvalue(), ok


def _parse_n_list(text: str) -> list[int]:
    try:
        values = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--n-list must be comma-separated integers, got {text!r}") from None
    if not values:
        raise UsageError("--n-list is empty")
    return values


def _run_sweep(pf: ProblemFile, n_list_text: str | None, out: str | None, method: str) -> int:
    if n_list_text is not None:
        n_list = _parse_n_list(n_list_text)
    elif pf.sweep:
        n_list = list(pf.sweep)
    else:
        raise UsageError("no degrees given: pass --n-list or set 'sweep' in the problem file")
    k = pf.problem.order
    for n in n_list:
        if n < k:
            raise UsageError(f"sweep degree n={n} is below the problem order k={k}")
        if n > MAX_DEGREE:
            raise UsageError(f"sweep degree n={n} exceeds the supported maximum {MAX_DEGREE}")
    text, ok = sweep_csv(pf, n_list, method)
    _write(text, out)
    return 0 if ok else 2


def basis_csv(n: int) -> str:
    b = orthonormal_basis(n)
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(["k"] + [f"coeff_{i}" for i in range(n + 1)])
    for k, phi in enumerate(b.phis):
        w.writerow([k] + [_num(c) for c in phi.to_array(n + 1)])
    return buf.getvalue()


def theta_csv(n: int) -> str:
    t = theta(n).theta
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(["i"] + [f"theta_{j}" for j in range(n + 1)])
    for i, row in enumerate(t):
        w.writerow([i] + [_num(v) for v in row])
    return buf.getvalue()


def _check_range(n: int) -> None:
    if not 0 <= n <= MAX_DEGREE:
        raise BasisError(f"n must lie in [0, {MAX_DEGREE}], got {n}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bernoulli-ide",
        description="Solve linear Volterra integro-differential equations on [0, 1] "
        "with an orthonormal Bernoulli polynomial basis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def solve_options(p):
        p.add_argument("--n", type=int, help="basis degree (default: file's n, else 7)")
        p.add_argument("--out", help="samples CSV path ('-' for stdout; default <name>_samples.csv)")
        p.add_argument("--method", choices=("auto", "general"), default="auto")
        p.add_argument("--reconstruction", choices=("integrate", "theta"), default="integrate")

    p = sub.add_parser("solve", help="solve a problem file")
    p.add_argument("file")
    solve_options(p)

    p = sub.add_parser("sweep", help="solve at several degrees and tabulate errors")
    p.add_argument("file")
    p.add_argument("--n-list", help="comma-separated degrees, e.g. 3,5,7")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--method", choices=("auto", "general"), default="auto")

    for name, helptext in (("basis", "dump basis coefficients as CSV"), ("theta", "dump the integration matrix as CSV")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--out", help="CSV path (default stdout)")

    p = sub.add_parser("examples", help="built-in example problems")
    esub = p.add_subparsers(dest="action", required=True)
    esub.add_parser("list", help="list built-in examples")
    ep = esub.add_parser("show", help="print an example's problem file")
    ep.add_argument("name", choices=BUILTIN)
    ep = esub.add_parser("run", help="solve a built-in example")
    ep.add_argument("name", choices=BUILTIN)
    solve_options(ep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    stage = 1
    try:
        if args.command == "basis":
            _check_range(args.n)
            _write(basis_csv(args.n), args.out)
            return 0
        if args.command == "theta":
            _check_range(args.n)
            _write(theta_csv(args.n), args.out)
            return 0
        if args.command == "examples":
            if args.action == "list":
                sys.stdout.write("".join(f"{name}\n" for name in BUILTIN))
                return 0
            if args.action == "show":
                sys.stdout.write(builtin_text(args.name))
                return 0
            pf = load_builtin(args.name)
            stage = 2
            return _run_solve(pf, args.n, args.out, args.method, args.reconstruction)
        pf = load_problem(args.file)
        stage = 2
        if args.command == "solve":
            return _run_solve(pf, args.n, args.out, args.method, args.reconstruction)
        return _run_sweep(pf, args.n_list, args.out, args.method)
    except (UsageError, ProblemError, BasisError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ExprError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return stage
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except IdeError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
