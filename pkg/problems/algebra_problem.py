from symmetry.algebra import LieAlgebra, parse_combination
from symmetry.errors import ParseError, SymmetryError
from symmetry.jet import VectorField
from symmetry.parser import ParseContext, parse
from .base_problem import BaseProblem


class AlgebraProblem(BaseProblem):
    """Reader for .alg files: a basis of vector fields and named elements.

        coordinates t x u E h
        parameter alpha beta
        basis Y3 t = 2*t; x = x; h = -2*h
        field W x = -x; h = 2*h; E = exp(-u)*E
        representative A5 = alpha*Y1 + Y2
    """

    keywords = ("name", "coordinates", "parameter", "basis", "field", "representative")

    def __init__(self, path=None, text=None):
        self.name = ""
        self.coords = ()
        self.parameters = []
        self._basis = []
        self._fields = []
        self._representatives = []
        self.algebra = None
        self.fields = {}
        self.representatives = []
        super().__init__(path, text)

    def read_name(self, line):
        self.name = line.rest

    def read_coordinates(self, line):
        self.coords = tuple(line.words())

    def read_parameter(self, line):
        self.parameters.extend(line.words())

    def read_basis(self, line):
        self._basis.append(line)

    def read_field(self, line):
        self._fields.append(line)

    def read_representative(self, line):
        self._representatives.append(line)

    def context(self):
        return ParseContext(symbols=set(self.coords) | set(self.parameters))

    def _vector_field(self, line):
        name, _, body = line.rest.partition(" ")
        offset = len(name) + 1
        coeffs = {}
        for part in body.split(";"):
            if not part.strip():
                offset += len(part) + 1
                continue
            coord, value, value_offset = self.split_assignment(line, part)
            if coord not in self.coords:
                raise line.error(f"{coord} is not a coordinate", offset)
            if coord in coeffs:
                raise line.error(f"coefficient of {coord} given twice", offset)
            coeffs[coord] = parse(value, self.context(), line.number, line.column + offset + value_offset)
            offset += len(part) + 1
        if not coeffs:
            raise line.error(f"field {name} has no components")
        return name, VectorField(self.coords, coeffs)

    def finish(self):
        if not self.coords:
            raise ParseError("coordinates must be declared", 1)
        if not self._basis:
            raise ParseError("no basis fields declared", 1)
        named = [self._vector_field(line) for line in self._basis]
        try:
            self.algebra = LieAlgebra([v for _, v in named], [n for n, _ in named])
        except SymmetryError as err:
            raise ParseError(str(err), self._basis[0].number) from err
        for line in self._fields:
            name, v = self._vector_field(line)
            self.fields[name] = v
        for line in self._representatives:
            name, text, offset = self.split_assignment(line)
            try:
                coeffs = parse_combination(text, self.algebra.names, self.context())
            except SymmetryError as err:
                raise line.error(str(err), offset) from None
            self.representatives.append((name, coeffs))

    def representative_fields(self):
        """(name, VectorField) in declaration order."""
        return [(name, self.algebra.combination(coeffs)) for name, coeffs in self.representatives]
