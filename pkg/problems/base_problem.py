import os

from symmetry.errors import ParseError


def read_lines(path):
    """(line number, text) for every non-empty line with `#` comments removed."""
    if not os.path.isfile(path):
        raise FileNotFoundError(f"{path} not found")
    out = []
    with open(path, "r") as stream:
        for number, line in enumerate(stream, start=1):
            text = line.split("#", 1)[0].rstrip()
            if text.strip():
                out.append((number, text))
    return out


class Line:
    """One declaration: keyword, the rest of the line and where the rest starts."""

    def __init__(self, number, text):
        self.number = number
        stripped = text.lstrip()
        indent = len(text) - len(stripped)
        self.keyword, _, rest = stripped.partition(" ")
        self.rest = rest.strip()
        self.column = indent + len(self.keyword) + 1 + (len(rest) - len(rest.lstrip())) + 1

    def error(self, message, offset=0):
        return ParseError(message, self.number, self.column + offset)

    def words(self):
        return self.rest.split()


class BaseProblem:
    """Line-oriented reader; subclasses register a handler per keyword."""

    keywords = ()

    def __init__(self, path=None, text=None):
        assert (path is None) != (text is None), "give either a path or a text"
        self.path = path
        if path is not None:
            lines = read_lines(path)
        else:
            lines = [(i, t.split("#", 1)[0].rstrip()) for i, t in enumerate(text.splitlines(), start=1)]
            lines = [(i, t) for i, t in lines if t.strip()]
        self.lines = [Line(number, text) for number, text in lines]
        for line in self.lines:
            if line.keyword not in self.keywords:
                raise line.error(f"unknown keyword {line.keyword!r}", -len(line.keyword) - 1)
            getattr(self, f"read_{line.keyword}")(line)
        self.finish()

    @staticmethod
    def split_assignment(line, text=None, sep="="):
        """(left, right, column offset of right) for `left = right`."""
        text = line.rest if text is None else text
        if sep not in text:
            raise line.error(f"expected '{sep}' in {text!r}")
        left, _, right = text.partition(sep)
        offset = len(left) + len(sep) + (len(right) - len(right.lstrip()))
        return left.strip(), right.strip(), offset

    def finish(self):
        raise NotImplementedError
