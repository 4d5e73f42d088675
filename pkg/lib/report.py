import json


class Report:
    """Text lines and a JSON payload {command, input, results, findings} for one command.

    Expression strings in results use the input problem's names: E, h and the
    ansatz unknowns are function atoms, so they re-parse to the same Expr only
    with that problem's parse context. `context` records those declarations
    (functions with their arguments, parameters) and goes into the payload.
    """

    def __init__(self, command, input_path):
        self.command = command
        self.input = input_path
        self.results = {}
        self.findings = []
        self.lines = []
        self.context = None

    def add(self, key, value):
        self.results[key] = value

    def line(self, text=""):
        self.lines.append(text)

    def table(self, header, rows, fmt):
        """Aligned rows in the style of ('%20s' + '%12s' * n) % (...)."""
        self.lines.append(fmt % tuple(header))
        for row in rows:
            self.lines.append(fmt % tuple(row))

    def finding(self, where, message, **details):
        record = {"where": where, "message": message}
        record.update({k: v for k, v in details.items() if v is not None})
        self.findings.append(record)

    def render(self, as_json=False):
        if as_json:
            payload = {"command": self.command, "input": self.input,
                       "results": self.results, "findings": self.findings}
            if self.context is not None:
                payload["context"] = self.context
            return json.dumps(payload, indent=2)
        out = list(self.lines)
        if self.findings:
            out.append("")
            out.append(f"Findings ({len(self.findings)}):")
            for f in self.findings:
                out.append(f"  [{f['where']}] {f['message']}")
        return "\n".join(out)
