from symmetry import expr as ex
from symmetry.detsys import Constraint, DeterminingSystem
from symmetry.parser import parse
from .base_problem import BaseProblem


class FixtureProblem(BaseProblem):
    """Reader for .fix files: printed determining equations, one per line.

        eq E_u*xi1_x = 0
        eq eta_u - xi1_t + E*xi1_xx = 0

    Equations are parsed leniently against the problem they belong to:
    derivatives of unknowns outside their argument list read as 0 and are noted.
    """

    keywords = ("eq",)

    def __init__(self, spec, path=None, text=None):
        self.spec = spec
        self.context = spec.parse_context(lenient=True)
        self.constraints = []
        super().__init__(path, text)

    def read_eq(self, line):
        if "=" in line.rest:
            left, right, offset = self.split_assignment(line)
            lhs = parse(left, self.context, line.number, line.column)
            rhs = parse(right, self.context, line.number, line.column + offset)
            e = ex.sub(lhs, rhs)
        else:
            e = parse(line.rest, self.context, line.number, line.column)
        self.constraints.append(Constraint(e, source=line.number))

    def finish(self):
        self.system = DeterminingSystem(self.constraints, spec=self.spec, notes=self.context.notes)
