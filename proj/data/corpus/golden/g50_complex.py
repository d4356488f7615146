class ReportBuilder:
    def __init__(self, title, rows=[]):
        self.title = title
        self.Rows = rows

    def build(self, fmt, extra):
        lines = [self.title]
        for idx, row in enumerate(self.Rows):
            label = str(idx)
            lines.append(", ".join(str(c) for c in row))
        if fmt == "md":
            return "\n".join(lines)
        elif fmt == "txt":
            return " ".join(lines)
        return None
