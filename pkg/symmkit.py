import os
import re
import sys
import argparse
from fractions import Fraction

import yaml

from lib.general import rank
from lib.load import load_config, load_problem, load_yaml
from lib.logger import logger, setup_logger
from lib.report import Report
from symmetry import expr as ex
from symmetry.algebra import combination_str, parse_combination, span_rank
from symmetry.classify import (PROJECTION, functionally_dependent, invariant_check, jacobian_rank, optimal_rows,
                               project)
from symmetry.detsys import determining_system, diff_fixture, verify
from symmetry.errors import ModeError, NonInvertibleError, SpecError, SymmetryError, UnsupportedFlowError
from symmetry.flows import REFLECTIONS, flow, named_reflection, pushforward_equation, scaling_family, transport_solution
from symmetry.jet import VectorField
from symmetry.parser import ParseContext, parse
from symmetry.problem import AnsatzSpec
from symmetry.solver import solve, unrestricted_point_check

COMMANDS = ("determining", "symmetries", "equivalence", "algebra", "optimal", "classify", "transform")
ALGEBRA_COMMANDS = ("table", "adjoint", "killing", "series")
OPERATOR_RE = re.compile(r"d/d([A-Za-z][A-Za-z0-9]*)")


def parse_field(text, coords, context=None):
    """'t = 2*t; x = x; h = -2*h' -> VectorField on coords."""
    context = context or ParseContext.open()
    coeffs = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        coord, sep, value = part.partition("=")
        if not sep:
            raise SpecError(f"expected 'coordinate = coefficient' in {part.strip()!r}")
        coeffs[coord.strip()] = parse(value.strip(), context)
    return VectorField(coords, coeffs)


def parse_operator(text, coords):
    """'alpha*d/dt + d/dx' -> VectorField on coords."""
    marks = {c: f"dd{c}" for c in coords}

    def mark(match):
        if match.group(1) not in marks:
            raise SpecError(f"d/d{match.group(1)} is not a coordinate derivative")
        return marks[match.group(1)]

    e = parse(OPERATOR_RE.sub(mark, text))
    symbols = {ex.symbol(m): c for c, m in marks.items()}
    grouped = ex.collect(e, list(symbols))
    if set(grouped) - set(symbols):
        raise SpecError(f"{text} is not a first order operator")
    return VectorField(coords, {symbols[m]: coeff for m, coeff in grouped.items()})


def parse_composite(text):
    """'f(t*exp(2*s), x*exp(s))' -> ('f', [t*exp(2*s), x*exp(s)])."""
    head, _, body = text.strip().partition("(")
    if not body.endswith(")"):
        raise SpecError(f"expected NAME(args) in {text!r}")
    args, depth, current = [], 0, ""
    for ch in body[:-1]:
        if ch == "," and depth == 0:
            args.append(current)
            current = ""
            continue
        depth += (ch == "(") - (ch == ")")
        current += ch
    args.append(current)
    return head.strip(), [parse(a.strip()) for a in args]


def as_symbols(e, names):
    """E(u) -> E for the arbitrary functions in names."""
    mapping = {a: ex.symbol(a.name) for a in e.atoms
               if isinstance(a, ex.FuncAtom) and a.name in names and not a.index}
    return ex.substitute_many(e, mapping)


def same_span(a, b):
    r = span_rank(list(a) + list(b))
    return r == span_rank(a) == span_rank(b)


def parse_params(items):
    params = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise SpecError(f"--param expects NAME=VALUE, got {item!r}")
        params[ex.symbol(name.strip())] = ex.const(Fraction(value.strip()))
    return params


class SymmKit:
    def __init__(self, args):
        self.args = args
        self.config = load_config(args.config)
        self.progress = bool(self.config["progress"])
        claims_path = args.claims or self.config["paths"].get("claims")
        self.claims = load_yaml(claims_path) if claims_path and os.path.isfile(claims_path) else {}
        self.positive = frozenset(p.strip() for p in (args.assume_positive or "").split(",") if p.strip())
        self.params = parse_params(args.param)
        self.report = Report(args.command if not args.subcommand else f"{args.command} {args.subcommand}",
                             args.input)

    def ansatz(self):
        degree = self.args.degree if self.args.degree is not None else self.config["solver"]["degree"]
        return AnsatzSpec(degree)

    def load_spec(self):
        if self.args.input is None:
            raise SpecError(f"{self.args.command} needs a .pde input")
        spec = load_problem(self.args.input).spec
        functions = {u.name: list(u.args) for u in spec.unknowns}
        functions.update({name: list(args) for name, args in spec.functions.items()})
        self.report.context = {"problem": spec.name, "mode": spec.mode,
                               "arbitrary": {name: list(args) for name, args in spec.jet.arbitrary.items()},
                               "functions": functions, "parameters": list(spec.parameters)}
        return spec

    def load_algebra(self, path=None):
        path = path or self.args.algebra or self.config["paths"]["algebra"]
        return load_problem(path, "alg")

    def with_params(self, v):
        if not self.params:
            return v
        return v.map(lambda e: ex.substitute_many(e, self.params))

    def run(self):
        getattr(self, self.args.command)()
        return self.report

    # determining / symmetries / equivalence

    def determining(self):
        spec = self.load_spec()
        system = determining_system(spec, stage=self.args.stage)
        lines = system.lines()
        self.report.add("problem", spec.name)
        self.report.add("equation", spec.equation_str())
        self.report.add("constraints", lines)
        self.report.line(f"{spec.name}: {spec.equation_str()}")
        self.report.table(("N", "Constraint"), [(i + 1, line) for i, line in enumerate(lines)], "%4s  %s")

        claims = self.claims.get("determining", {}).get(spec.name, {})
        context = spec.parse_context()
        for text in claims.get("contains", []):
            e = parse(text, context)
            if not system.contains(e, spec.arbitrary_atoms(e)):
                self.report.finding("determining", f"{text} = 0 is not among the generated constraints")
        if claims.get("solution"):
            self.check_solution(spec, system, claims["solution"])
        if self.args.fixture:
            self.fixture_diff(spec, system)

    def check_solution(self, spec, system, solution):
        coords = {u.name: u.coord for u in spec.unknowns}
        coeffs = {coords[name]: parse(str(text)) for name, text in solution.items()}
        constants = sorted({a.name for e in coeffs.values() for a in e.atoms if isinstance(a, ex.Symbol)}
                           - set(spec.coordinates) - set(spec.parameters))
        claimed = [VectorField(spec.coordinates, {c: ex.differentiate(e, k) for c, e in coeffs.items()})
                   for k in constants]
        space = solve(system, spec, self.ansatz(), probe=False, progress=self.progress)
        self.report.add("solution", [str(v) for v in space.basis])
        self.report.line(f"general solution: span of {', '.join(str(v) for v in space.basis) or '0'}")
        if not same_span(claimed, space.basis):
            self.report.finding("determining", "printed general solution spans "
                                f"{', '.join(str(v) for v in claimed)}; the system gives "
                                f"{', '.join(str(v) for v in space.basis)}")

    def fixture_diff(self, spec, system):
        fixture = load_problem(self.args.fixture, "fix", spec=spec).system
        diff = diff_fixture(system, fixture, seed=self.config["check"]["seed"])
        self.report.line()
        self.report.line(f"fixture {self.args.fixture}:")
        self.report.table(("N", "Line", "Implied", "Equation"),
                          [(e.index, e.source, "yes" if e.implied else "no", e.text) for e in diff.fixture_entries],
                          "%4s%6s%9s  %s")
        for note in diff.notes:
            self.report.line(f"note: {note}")
        self.report.add("fixture", [{"index": e.index, "line": e.source, "equation": e.text, "implied": e.implied}
                                    for e in diff.fixture_entries])
        self.report.add("fixture_notes", diff.notes)
        self.report.add("generated_not_implied", [e.text for e in diff.unimplied_generated])
        for e in diff.unimplied_fixture:
            self.report.finding("determining fixture",
                                f"printed equation {e.index} ({e.text}) is not implied by the generated system",
                                line=e.source)

    def report_space(self, spec, space, key="basis"):
        self.report.add("dimension", space.dimension)
        self.report.add(key, [str(v) for v in space.basis])
        self.report.add("degree", space.degree)
        self.report.add("stable", space.stable)
        self.report.add("verified", space.verified)
        self.report.add("unresolved", [f"{c}: {name} * {ex.to_string(mono)}" for c, name, mono in space.unresolved])
        self.report.line(f"{spec.name}: {spec.equation_str()}")
        self.report.line(f"dimension {space.dimension} at degree {space.degree}")
        self.report.table(("N", "Generator"), [(i + 1, str(v)) for i, v in enumerate(space.basis)], "%4s  %s")
        if space.stable is not None:
            self.report.line(f"degree {space.degree + 1}: dimension {space.probe_dimension}"
                             + ("" if space.stable else " (changed)"))
        if not space.verified:
            self.report.finding("solver", "a basis field fails verification")

    def check_space(self, spec, space, claims, where):
        if "dimension" in claims and claims["dimension"] != space.dimension:
            self.report.finding(where, f"printed dimension {claims['dimension']}, computed {space.dimension}")
        if "basis" in claims:
            claimed = [parse_operator(text, spec.coordinates) for text in claims["basis"]]
            if not same_span(claimed, space.basis):
                self.report.finding(where, f"printed basis {', '.join(claims['basis'])} does not span the "
                                    "computed solution space")

    def symmetries(self):
        spec = self.load_spec()
        space = solve(determining_system(spec), spec, self.ansatz(), probe=self.config["solver"]["probe"],
                      progress=self.progress)
        self.report_space(spec, space)
        if self.args.unrestricted:
            wide = unrestricted_point_check(spec, self.ansatz(), progress=self.progress)
            self.report.add("unrestricted", {"dimension": wide.dimension, "basis": [str(v) for v in wide]})
            self.report.line(f"unrestricted point symmetries: dimension {wide.dimension}")
            if wide.dimension != space.dimension:
                self.report.finding("symmetries", f"unrestricted point symmetries have dimension {wide.dimension}, "
                                    f"projectable ones {space.dimension}")
        claims = self.claims.get("symmetries", {}).get(spec.name)
        if claims:
            self.check_space(spec, space, claims, claims.get("where", "symmetries"))

    def equivalence(self):
        spec = self.load_spec()
        if spec.mode != "equivalence":
            raise ModeError(f"{self.args.input} is not declared with 'mode equivalence'")
        system = determining_system(spec)
        space = solve(system, spec, self.ansatz(), probe=self.config["solver"]["probe"], progress=self.progress)
        self.report_space(spec, space)

        wide_spec = spec
        for u in spec.unknowns:
            if u.shape != ex.ONE or u.poly_vars is not None or u.degree is not None:
                wide_spec = wide_spec.with_unknown(u.name, shape=ex.ONE, poly_vars=None, degree=None)
        if wide_spec is not spec:
            wide = solve(determining_system(wide_spec), wide_spec, self.ansatz(), probe=False,
                         progress=self.progress)
            self.report.add("unshaped", {"dimension": wide.dimension, "basis": [str(v) for v in wide]})
            self.report.line(f"without shapes: dimension {wide.dimension}")
            self.report.table(("N", "Generator"), [(i + 1, str(v)) for i, v in enumerate(wide.basis)], "%4s  %s")

        claims = self.claims.get("equivalence", {}).get(spec.name, {})
        where = claims.get("where", "equivalence")
        rows = []
        checks = {}
        for name, text in claims.get("generators", {}).items():
            v = parse_field(text, spec.coordinates)
            residuals = verify(v, spec)
            checks[name] = {"field": str(v), "residuals": [ex.to_string(r) for r in residuals]}
            rows.append((name, "yes" if not residuals else f"no ({len(residuals)})", str(v)))
            if residuals:
                self.report.finding(where, f"{name} = {v} is not an equivalence generator; first residual "
                                    f"{ex.to_string(residuals[0])} = 0")
        if rows:
            self.report.line()
            self.report.table(("Name", "Verified", "Generator"), rows, "%6s%10s  %s")
        self.report.add("generators", checks)
        if "dimension" in claims and claims["dimension"] != space.dimension:
            self.report.finding(where, f"printed dimension {claims['dimension']} under the shaped ansatz, "
                                f"computed {space.dimension}")
        if self.args.fixture:
            self.fixture_diff(spec, system)

    # algebra

    def algebra(self):
        problem = self.load_algebra(self.args.input)
        alg = problem.algebra
        self.report.add("basis", {name: str(v) for name, v in zip(alg.names, alg.basis)})
        getattr(self, f"algebra_{self.args.subcommand}")(alg, self.claims.get("algebra", {}))

    def _check_entries(self, alg, table, claimed, where, label):
        for i, a in enumerate(alg.names):
            for j, b in enumerate(alg.names):
                text = claimed.get(f"{a},{b}")
                if text is None:
                    continue
                expected = parse_combination(text, alg.names)
                got = [ex.as_expr(x) for x in table[i][j]]
                if expected != got:
                    self.report.finding(where, f"{label.format(a=a, b=b)}: printed {text}, computed "
                                        f"{combination_str(got, alg.names)}")

    def algebra_table(self, alg, claims):
        names = alg.names
        table = alg.commutator_table()
        self.report.table(["[,]"] + names,
                          [[a] + [combination_str(table[i][j], names) for j in range(alg.dim)]
                           for i, a in enumerate(names)],
                          "%8s" + "%12s" * alg.dim)
        self.report.add("commutators", {f"{a},{b}": combination_str(table[i][j], names)
                                        for i, a in enumerate(names) for j, b in enumerate(names)})
        self.report.add("jacobi", [list(t) for t in alg.jacobi_residuals()])
        self._check_entries(alg, table, claims.get("commutators", {}), claims.get("where", "algebra"), "[{a}, {b}]")

    def algebra_adjoint(self, alg, claims):
        names = alg.names
        table = alg.adjoint_table()
        self.report.table(["Ad"] + names,
                          [[a] + [combination_str(table[i][j], names) for j in range(alg.dim)]
                           for i, a in enumerate(names)],
                          "%8s" + "%18s" * alg.dim)
        self.report.add("adjoint", {f"{a},{b}": combination_str(table[i][j], names)
                                    for i, a in enumerate(names) for j, b in enumerate(names)})
        self.report.add("automorphism", {a: alg.is_automorphism(i) for i, a in enumerate(names)})
        self._check_entries(alg, table, claims.get("adjoint", {}), claims.get("where", "algebra"),
                            "Ad(exp(s*{a})){b}")

    def algebra_killing(self, alg, claims):
        K = alg.killing_form()
        matrix = [[str(x) for x in row] for row in alg.killing_matrix()]
        self.report.line(f"K = {ex.to_string(K)}")
        self.report.line(f"semisimple: {'yes' if alg.is_semisimple() else 'no'}")
        self.report.add("killing", ex.to_string(K))
        self.report.add("killing_matrix", matrix)
        self.report.add("semisimple", alg.is_semisimple())
        if "killing" in claims and parse(claims["killing"]) != K:
            self.report.finding("killing form", f"printed {claims['killing']}, computed {ex.to_string(K)}")
        if "semisimple" in claims and claims["semisimple"] != alg.is_semisimple():
            self.report.finding("killing form", f"printed semisimple = {claims['semisimple']}")

    def algebra_series(self, alg, claims):
        series = alg.derived_series()
        terms = [[combination_str(row, alg.names) for row in term] for term in series]
        for k, term in enumerate(terms):
            self.report.line(f"g^({k}) = span{{{', '.join(term)}}}" if term else f"g^({k}) = 0")
        center = [combination_str(v, alg.names) for v in alg.center()]
        self.report.line(f"center = span{{{', '.join(center)}}}")
        self.report.line(f"solvable: {'yes' if alg.is_solvable() else 'no'}")
        self.report.add("derived_series", terms)
        self.report.add("center", center)
        self.report.add("solvable", alg.is_solvable())
        for k, claimed in enumerate(claims.get("derived", []), start=1):
            rows = [[x.value for x in parse_combination(text, alg.names)] for text in claimed]
            got = series[k] if k < len(series) else []
            together = rank(rows + [list(r) for r in got], alg.dim)
            if not (together == rank(rows, alg.dim) == len(got)):
                self.report.finding("derived series", f"printed g^({k}) = span{{{', '.join(claimed)}}}, computed "
                                    f"span{{{', '.join(terms[k]) if k < len(terms) else ''}}}")
        if "solvable" in claims and claims["solvable"] != alg.is_solvable():
            self.report.finding("derived series", f"printed solvable = {claims['solvable']}")

    # optimal system

    def optimal(self):
        problem = self.load_algebra(self.args.input)
        alg = problem.algebra
        claims = self.claims.get("optimal", {})
        where = claims.get("where", "optimal system")
        max_length = self.config["search"]["max_length"]
        params = {a.name for _, coeffs in problem.representatives for c in coeffs for a in ex.as_expr(c).atoms}

        rows = []
        cases = {}
        for case in claims.get("cases", []):
            status = self.check_case(alg, case, max_length, where)
            rows.append((case["case"], status, case["start"]))
            cases[case["case"]] = status
        self.report.table(("Case", "Status", "Start"), rows, "%6s%14s  %s")
        self.report.add("cases", cases)

        reps = {}
        rep_rows = []
        for name, coeffs in problem.representatives:
            status = self.check_fixed(alg, coeffs, params, max_length, f"{where}, {name}")
            reps[name] = {"element": combination_str(coeffs, alg.names), "status": status}
            rep_rows.append((name, status, combination_str(coeffs, alg.names)))
        self.report.line()
        self.report.table(("Name", "Status", "Representative"), rep_rows, "%6s%14s  %s")
        self.report.add("representatives", reps)
        for name, text in claims.get("representatives", {}).items():
            got = dict(problem.representatives).get(name)
            if got is None or parse_combination(text, alg.names) != got:
                self.report.finding(where, f"representative {name} = {text} is not in {problem.path}")

    def check_case(self, alg, case, max_length, where):
        names = alg.names
        label = f"{where}, case {case['case']}"
        start = parse_combination(case["start"], names)
        nonzero = set(case.get("nonzero", []))
        if "steps" in case:
            steps = [(key, parse(str(value))) for key, value in case["steps"]]
            got = alg.reduce(start, steps)
            expected = parse_combination(case["result"], names)
            residual = [ex.sub(g, e) for g, e in zip(got, expected)]
            if all(r.is_zero for r in residual):
                return "confirmed"
            cancel = [i for i, e in enumerate(expected) if e.is_zero and not start[i].is_zero]
            search = alg.search_reduction(start, cancel, max_length, nonzero, progress=self.progress)
            hint = ""
            if search.witness is not None:
                w = search.witness
                solved = ", ".join(f"{ex.to_string(s)} = {ex.to_string(v)}" for s, v in w.solutions.values())
                hint = f"; {' then '.join(w.sequence)} cancels it with {solved}" if solved else ""
            self.report.finding(label, f"printed steps leave {combination_str(residual, names)}{hint}")
            return "residual"
        if "cancel" in case:
            search = alg.search_reduction(start, case["cancel"], max_length, nonzero, progress=self.progress)
            if search.reducible:
                return "confirmed"
            never = search.never_cancelled
            if never:
                self.report.finding(label, f"the {', '.join(names[c] for c in never)} coefficient of "
                                    f"{case['start']} stays nonzero under every adjoint sequence; "
                                    f"{case['start']} is not reducible to {case.get('result', '0')}")
            else:
                self.report.finding(label, f"no adjoint sequence up to length {max_length} reduces {case['start']}")
            return "not reducible"
        if case.get("fixed"):
            return self.check_fixed(alg, start, nonzero, max_length, label)
        return "unchecked"

    def check_fixed(self, alg, start, nonzero, max_length, label):
        """'fixed' when no single nonzero coefficient can be cancelled or rescaled against another."""
        status = "fixed"
        start = [ex.as_expr(a) for a in start]
        live = [i for i, a in enumerate(start) if not a.is_zero]
        scalings = []
        for i in live:
            search = alg.search_reduction(start, [i], max_length, nonzero, progress=self.progress)
            scalings = scalings or search.scalings
            if search.reducible:
                self.report.finding(label, f"the {alg.names[i]} coefficient cancels under "
                                    f"{' then '.join(search.witness.sequence)}")
                status = "reducible"
        for p, q, g, k in scalings:
            self.report.finding(label, f"the ratio of the {p} and {q} coefficients scales by exp({k}*s) "
                                f"under {g}; it can be normalized to +-1")
            status = "normalizable" if status == "fixed" else status
        return status

    # classification

    def classify(self):
        spec = self.load_spec()
        problem = self.load_algebra()
        reps = [(name, self.with_params(A)) for name, A in problem.representative_fields()]
        rows, excluded = optimal_rows(reps, spec)
        seed = self.config["check"]["seed"]
        claims = self.claims.get("classify", {})
        where = claims.get("where", "classification")

        table = []
        payload = []
        for n, row in enumerate(rows, start=1):
            invs = [ex.to_string(I) for I in row.invariants]
            certified = all(invariant_check(row.Z, I, self.positive) for I in row.invariants)
            independent = jacobian_rank(row.invariants, row.Z.coords, seed) == len(row.invariants)
            if not (certified and independent):
                self.report.finding(where, f"invariants of {row.Z} fail their certificate")
            feas = row.feasibility
            entry = {"sources": row.sources, "Z": str(row.Z), "invariants": invs, "feasible": row.feasible,
                     "reason": feas.reason, "operators": [str(X) for X in row.operators]}
            if row.feasible:
                entry.update(E=ex.to_string(feas.E_form), h=ex.to_string(feas.h_form), equation=row.equation,
                             verified=row.verified)
                equation = row.equation
            else:
                equation = f"none: {feas.reason}"
            payload.append(entry)
            table.append((n, "=".join(row.sources), str(row.Z), ", ".join(invs), equation,
                          ", ".join(str(X) for X in row.operators) if row.feasible else "-"))
        self.report.table(("N", "Source", "Z", "Invariants", "Equation", "Additional operators"), table,
                          "%3s%8s  %-45s  %-40s  %-45s  %s")
        if excluded:
            self.report.line(f"zero projection: {', '.join(excluded)}")
        self.report.add("rows", payload)
        self.report.add("excluded", excluded)
        feasible = [row for row in rows if row.feasible]
        for row in feasible:
            if len(row.operators) > 1:
                self.report.line(f"note: row {'='.join(row.sources)} lists {len(row.operators)} additional "
                                 "operators for a one-dimensional extension")

        fields = dict(reps)
        for name, text in claims.get("projections", {}).items():
            expected = parse_field(text, PROJECTION)
            got = project(fields[name])
            if expected != got:
                self.report.finding(where, f"projection of {name}: printed {expected}, computed {got}")
        for name, texts in claims.get("invariants", {}).items():
            Z = project(fields[name])
            engine = [row.invariants for row in rows if name in row.sources]
            for text in texts:
                I = parse(text)
                if not invariant_check(Z, I, self.positive):
                    self.report.finding(where, f"{text} is not an invariant of {Z}")
                elif engine and not any(functionally_dependent(I, J, Z.coords, seed) for J in engine[0]):
                    self.report.finding(where, f"{text} is not a function of a single computed invariant of {Z}")
        if claims.get("worked"):
            self.check_worked(problem, fields, claims["worked"], where)
        self.check_rows(feasible, claims.get("rows", []), where)

    def check_worked(self, problem, fields, name, where):
        """Compare the field used in the worked example with the projection it stands for."""
        worked = project(problem.fields[name])
        for rep, A in fields.items():
            Z = project(A)
            if Z.support() != worked.support() or Z == worked:
                continue
            for p in sorted({n for c in Z.coords for n in Z[c].free_symbols} - set(Z.coords)):
                value = None
                for c in Z.support():
                    grouped = ex.collect(Z[c], [ex.symbol(p)])
                    if ex.symbol(p) in grouped and ex.ONE not in grouped:
                        value = ex.div(worked[c], grouped[ex.symbol(p)])
                        break
                if isinstance(value, ex.Const):
                    at = Z.map(lambda e: ex.substitute(e, ex.symbol(p), value))
                    if at == worked:
                        self.report.finding(where, f"{name} = {worked} is the projection of {rep} = {Z} "
                                            f"at {p} = {ex.to_string(value)}")

    def check_rows(self, feasible, claimed_rows, where):
        unmatched = list(feasible)
        for claim in claimed_rows:
            E, h = parse(claim["E"]), parse(claim["h"])
            for row in unmatched:
                coords = row.operators[0].coords
                claimed_ops = [parse_operator(text, coords) for text in claim.get("operators", [])]
                if (row.feasibility.E_form == E and row.feasibility.h_form == h
                        and sorted(map(str, claimed_ops)) == sorted(map(str, row.operators))):
                    unmatched.remove(row)
                    break
            else:
                self.report.finding(where, f"printed row E = {claim['E']}, h = {claim['h']} with "
                                    f"{', '.join(claim.get('operators', []))} is not produced")
        for row in unmatched:
            self.report.finding(where, f"row {row.equation} with {', '.join(map(str, row.operators))} is not printed")

    # transformations

    def lookup(self, problem, name):
        alg = problem.algebra
        if name in alg.names:
            return alg.basis[alg.index(name)]
        if name in problem.fields:
            return problem.fields[name]
        reps = dict(problem.representative_fields())
        if name in reps:
            return self.with_params(reps[name])
        raise SpecError(f"{name} is neither a basis element nor a named field of {problem.path}")

    def transform(self):
        spec = self.load_spec()
        problem = self.load_algebra()
        coords = problem.coords
        maps = []
        everything = not (self.args.flow or self.args.family or self.args.reflection)
        flows = [self.args.flow] if self.args.flow else (problem.algebra.names if everything else [])
        for name in flows:
            maps.append((f"exp(s*{name})", name, flow(self.lookup(problem, name))))
        if self.args.family or everything:
            maps.append(("scaling family", None, scaling_family(coords)))
        reflections = [self.args.reflection] if self.args.reflection else (list(REFLECTIONS) if everything else [])
        for name in reflections:
            maps.append((name, None, named_reflection(name, coords)))

        claims = self.claims.get("transform", {})
        where = claims.get("where", "transformations")
        entries = []
        rows = []
        for label, name, T in maps:
            entry = self.describe_map(label, T, spec)
            entries.append(entry)
            rows.append((label, entry.get("consistent", "-"), entry["map"]))
            self.check_map(name, T, entry, claims, where)
        self.report.table(("Map", "Consistent", "Transformation"), rows, "%16s%12s  %s")
        for entry in entries:
            self.report.line()
            self.report.line(f"{entry['name']}:")
            for key in ("equation", "induced", "solution", "coefficients", "pushforward", "reasons"):
                if entry.get(key):
                    self.report.line(f"  {key}: {entry[key]}")
        self.report.add("maps", entries)

    def describe_map(self, label, T, spec):
        entry = {"name": label, "map": str(T)}
        try:
            push = pushforward_equation(T, spec)
            entry.update(equation=push.equation, fin_form=push.fin_form,
                         induced={k: ex.to_string(as_symbols(v, push.induced)) for k, v in push.induced.items()},
                         consistent=push.consistent, reasons=push.reasons)
        except (UnsupportedFlowError, NonInvertibleError) as err:
            entry["pushforward"] = str(err)
        if T.kind == "flow":
            try:
                f = ex.func("f", spec.jet.independents)
                sol = transport_solution(T, f, spec.jet.independents, spec.jet.dependent)
                entry["solution"] = str(sol)
                entry["coefficients"] = {k: ex.to_string(v) if isinstance(v, ex.Expr) else str(v)
                                         for k, v in sol.coefficients.items()}
            except (UnsupportedFlowError, NonInvertibleError) as err:
                entry["solution"] = f"not available: {err}"
        return entry

    def check_map(self, name, T, entry, claims, where):
        for coord, text in claims.get("flows", {}).get(name, {}).items():
            got = T[coord]
            if not isinstance(got, ex.Expr) or parse(text) != got:
                self.report.finding(where, f"flow of {name} sends {coord} to {T.component_str(coord)}; "
                                    f"printed {text}")
        claimed = claims.get("solutions", {}).get(name)
        if claimed and "solution" in entry:
            head, args = parse_composite(claimed["solution"])
            sol = entry["solution"]
            expected = f"{head}({', '.join(ex.to_string(a) for a in args)})"
            if sol != expected:
                self.report.finding(where, f"transported solution under {name} is {sol}; printed {claimed['solution']}")
            for coord, text in claimed.items():
                if coord == "solution":
                    continue
                got = entry.get("coefficients", {}).get(coord)
                if got is None or parse(got) != parse(text):
                    self.report.finding(where, f"the transported solution under {name} solves the equation with "
                                        f"{coord} = {got}; printed {text}")
        if T.kind == "family" and "induced" in entry:
            for coord, text in claims.get("family", {}).items():
                got = entry["induced"].get(coord)
                if got is None or parse(got) != parse(text):
                    self.report.finding(where, f"scaling family induces {coord}~ = {got}; printed {text}")
        if T.kind == "reflection" and T.name in claims.get("reflections", []) and entry.get("consistent") is False:
            self.report.finding(where, f"{T.name} alone is not an equivalence transformation: "
                                f"{'; '.join(entry['reasons'])}")


def resolve_operands(args):
    operands = list(args.operands)
    args.subcommand = None
    if args.command == "algebra":
        if not operands or operands[0] not in ALGEBRA_COMMANDS:
            raise SpecError(f"algebra needs one of {', '.join(ALGEBRA_COMMANDS)}")
        args.subcommand = operands.pop(0)
    if len(operands) > 1:
        raise SpecError(f"unexpected arguments: {' '.join(operands[1:])}")
    args.input = operands[0] if operands else None
    return args


def main(argv=None):
    parser = argparse.ArgumentParser(prog="symmkit")
    parser.add_argument("command", choices=COMMANDS, help="analysis to run")
    parser.add_argument("operands", nargs="*", help="input file; algebra takes table|adjoint|killing|series first")
    parser.add_argument("--degree", type=int, default=None, help="polynomial ansatz degree")
    parser.add_argument("--json", action="store_true", help="print the report as JSON")
    parser.add_argument("--fixture", type=str, default=None, help=".fix path with printed determining equations")
    parser.add_argument("--assume_positive", "--assume-positive", type=str, default="",
                        help="comma separated symbols taken as positive, e.g. h,x")
    parser.add_argument("--param", action="append", default=[], help="parameter value, e.g. beta=1")
    parser.add_argument("--config", type=str, default="data/config.yaml", help=".yaml path for defaults")
    parser.add_argument("--algebra", type=str, default=None, help=".alg path for optimal/classify/transform")
    parser.add_argument("--claims", type=str, default=None, help=".yaml path for printed reference statements")
    parser.add_argument("--log_file", type=str, default=None, help="also write the log to this file")
    parser.add_argument("--stage", type=int, default=2, choices=(1, 2),
                        help="determining: 1 splits by jet monomials only, 2 also over E and h")
    parser.add_argument("--unrestricted", action="store_true", help="also solve with unrestricted xi1, xi2")
    parser.add_argument("--flow", type=str, default=None, help="generator to integrate")
    parser.add_argument("--family", action="store_true", help="the scaling family of equivalence maps")
    parser.add_argument("--reflection", type=str, default=None, choices=list(REFLECTIONS), help="discrete map")

    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 0 if err.code in (0, None) else 2

    if args.log_file:
        setup_logger(args.log_file)
    logger.info(args)

    try:
        report = SymmKit(resolve_operands(args)).run()
    except (SymmetryError, NotImplementedError, OSError, yaml.YAMLError) as err:
        logger.error(f"{type(err).__name__}: {err}")
        return 2

    print(report.render(args.json))
    return 1 if report.findings else 0


if __name__ == "__main__":
    sys.exit(main())
