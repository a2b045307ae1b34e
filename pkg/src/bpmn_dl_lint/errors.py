"""Exception hierarchy shared by the loader, classifier and checker."""


class LintError(Exception):
    """Base class for every error the linter raises on bad input."""


class TBoxError(LintError):
    pass


class TBoxSyntaxError(TBoxError):
    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DuplicateAxiomError(TBoxError):
    def __init__(self, axiom_id, line=None):
        where = f" (line {line})" if line else ""
        super().__init__(f"duplicate axiom id {axiom_id}{where}")
        self.axiom_id = axiom_id


class UnknownSymbolError(TBoxError):
    def __init__(self, name, table, line=None):
        where = f"line {line}: " if line else ""
        super().__init__(f"{where}unknown {table} {name!r}")
        self.name = name
        self.table = table


class RoleHierarchyError(TBoxError):
    def __init__(self, message, roles=()):
        super().__init__(message)
        self.roles = tuple(roles)


class StratificationError(TBoxError):
    def __init__(self, cycle):
        super().__init__("negation cycle among defined concepts: " + ", ".join(cycle))
        self.cycle = tuple(cycle)


class DiagramError(LintError):
    pass


class DiagramSyntaxError(DiagramError):
    pass


class UnknownKindError(DiagramError):
    def __init__(self, kind, element_id, hint=""):
        msg = f"element {element_id!r}: unknown kind {kind!r}"
        super().__init__(msg + (f" ({hint})" if hint else ""))
        self.kind = kind
        self.element_id = element_id


class DanglingReferenceError(DiagramError):
    def __init__(self, missing, source, role):
        super().__init__(f"element {source!r} refers to missing id {missing!r} via {role}")
        self.missing = missing
        self.source = source
        self.role = role


class DatatypeMismatchError(DiagramError):
    pass


class DuplicateElementError(DiagramError):
    def __init__(self, element_id):
        super().__init__(f"duplicate element id {element_id!r}")
        self.element_id = element_id


class StaleViolationError(LintError):
    """The violation was produced against a different graph."""
