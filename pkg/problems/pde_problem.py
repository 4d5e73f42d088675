import re

from symmetry import expr as ex
from symmetry.errors import ParseError, SpecError, SymmetryError
from symmetry.jet import JetContext
from symmetry.parser import ParseContext, parse
from symmetry.problem import ProblemSpec, UnknownSpec
from .base_problem import BaseProblem

DECLARATION_RE = re.compile(r"^([A-Za-z][A-Za-z0-9]*)\(([^)]*)\)$")
SHAPE_RE = re.compile(r"^(.*?)\*?poly\(([^)]*)\)$")


def _declaration(line, word):
    match = DECLARATION_RE.match(word)
    if not match:
        raise line.error(f"expected NAME(arg, ...), got {word!r}", line.rest.find(word))
    args = tuple(a.strip() for a in match.group(2).split(",") if a.strip())
    return match.group(1), args


class PDEProblem(BaseProblem):
    """Reader for .pde files.

        name fin
        independent t x
        dependent u
        arbitrary E(u) h(x)
        parameter alpha
        mode base | equivalence
        equation u_t = Dx(E*u_x) + h*u
        ansatz xi1(t,x) xi2(t,x) eta(t,x,u)
        shape phi exp(-u)*poly(E,2)
        specialize h = 0
    """

    keywords = ("name", "independent", "dependent", "arbitrary", "parameter", "mode", "order",
                "equation", "ansatz", "shape", "specialize")

    def __init__(self, path=None, text=None):
        self.name = ""
        self.independents = ()
        self.dependent = None
        self.arbitrary = {}
        self.parameters = []
        self.mode = "base"
        self.order = 2
        self.equation = None
        self.ansatz = []
        self.shapes = []
        self.specializations = []
        self.spec = None
        super().__init__(path, text)

    def read_name(self, line):
        self.name = line.rest

    def read_independent(self, line):
        self.independents = tuple(line.words())

    def read_dependent(self, line):
        words = line.words()
        if len(words) != 1:
            raise line.error("exactly one dependent variable is supported")
        self.dependent = words[0]

    def read_arbitrary(self, line):
        for word in line.words():
            name, args = _declaration(line, word)
            self.arbitrary[name] = args

    def read_parameter(self, line):
        self.parameters.extend(line.words())

    def read_mode(self, line):
        if line.rest not in ("base", "equivalence"):
            raise line.error(f"mode must be base or equivalence, got {line.rest!r}")
        self.mode = line.rest

    def read_order(self, line):
        if not line.rest.isdigit() or int(line.rest) < 1:
            raise line.error(f"order must be a positive integer, got {line.rest!r}")
        self.order = int(line.rest)

    def read_equation(self, line):
        if self.equation is not None:
            raise line.error("equation declared twice")
        self.equation = line

    def read_ansatz(self, line):
        for word in line.words():
            self.ansatz.append(_declaration(line, word))

    def read_shape(self, line):
        name, _, body = line.rest.partition(" ")
        match = SHAPE_RE.match(body.strip())
        if not name or not match:
            raise line.error(f"expected 'shape NAME FACTOR*poly(vars, degree)', got {line.rest!r}")
        pieces = [p.strip() for p in match.group(2).split(",")]
        if len(pieces) < 2 or not pieces[-1].isdigit():
            raise line.error(f"poly(...) needs variables and a degree, got {match.group(2)!r}")
        self.shapes.append((line, name, match.group(1).strip(), tuple(pieces[:-1]), int(pieces[-1])))

    def read_specialize(self, line):
        self.specializations.append(line)

    def finish(self):
        if not self.independents or self.dependent is None:
            raise ParseError("independent and dependent variables must be declared", 1)
        if self.equation is None:
            raise ParseError("no equation declared", self.lines[-1].number if self.lines else 1)
        try:
            jet = JetContext(self.independents, self.dependent, self.order, self.arbitrary,
                             equivalence=self.mode == "equivalence")
        except SymmetryError as err:
            raise ParseError(str(err), 1) from None
        context = jet.parse_context(self.parameters)
        lhs_text, rhs_text, offset = self.split_assignment(self.equation)
        lhs = parse(lhs_text, context, self.equation.number, self.equation.column)
        rhs = parse(rhs_text, context, self.equation.number, self.equation.column + offset)

        unknowns = [UnknownSpec(name, coord, args)
                    for (name, args), coord in zip(self.ansatz, jet.coordinates)]
        shape_context = ParseContext(symbols=set(jet.coordinates) | set(self.parameters))
        for line, name, factor, poly_vars, degree in self.shapes:
            found = [u for u in unknowns if u.name == name]
            if not found:
                raise line.error(f"shape for undeclared unknown {name}")
            shape = parse(factor, shape_context, line.number, line.column) if factor else ex.ONE
            unknowns = [u.copy(shape=shape, poly_vars=poly_vars, degree=degree) if u.name == name else u
                        for u in unknowns]
        try:
            spec = ProblemSpec(jet, lhs, rhs, unknowns, self.parameters, self.name)
        except SpecError as err:
            raise ParseError(str(err), self.equation.number) from None

        for line in self.specializations:
            name, value_text, offset = self.split_assignment(line)
            value = parse(value_text, ParseContext.open(), line.number, line.column + offset)
            try:
                new = tuple(sorted(a.name for a in value.atoms if isinstance(a, ex.Symbol)
                                   and a.name not in spec.jet.arbitrary.get(name, ())
                                   and a.name not in spec.parameters))
                spec = spec.specialize(name, value, parameters=new)
            except SpecError as err:
                raise line.error(str(err)) from None
        self.spec = spec
