"""Pipeline language: lexer, syntax tree, parser, and printer.

A pipeline is a sequence of operations joined by ``|``::

    filter(volume > 0.4) | pick(left AND above) | log()

Grammar sketch (the full EBNF lives in docs/grammar.md)::

    pipeline   = [ operation { "|" operation } ]
    operation  = word "(" arguments ")"
    expression = or_expr
    or_expr    = and_expr { ("OR" | "||") and_expr }
    and_expr   = not_expr { ("AND" | "&&") not_expr }
    not_expr   = "NOT" not_expr | comparison
    comparison = sum [ ("==" | "!=" | "<=" | ">=" | "<" | ">") sum ]
    sum        = term { ("+" | "-") term }
    term       = factor { ("*" | "/") factor }
    factor     = "-" factor | postfix
    postfix    = primary { "[" integer "]" | "." word }
    primary    = number | string | boolean | word [ "(" expr-list ")" ]
               | "(" expression ")"

Whitespace including newlines is insignificant.  Keywords are matched
case-insensitively; strings are single-quoted with no escapes.  Parsing
any printed tree reproduces the tree exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union


class PipelineParseError(ValueError):
    """Syntax error with 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__("line %d, column %d: %s" % (line, column, message))
        self.line = line
        self.column = column


# ---------------------------------------------------------------------------
# tokens

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*|\d+[A-Za-z][A-Za-z0-9_]*)
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<string>'[^']*')
  | (?P<range>\.\.)
  | (?P<op>==|!=|<=|>=|&&|\|\||[|()\[\];:?,.=<>+\-*/])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # word | number | string | op | end
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise PipelineParseError(
                "unexpected character %r" % text[pos], line, pos - line_start + 1
            )
        kind = match.lastgroup
        value = match.group()
        if kind == "ws":
            for i, ch in enumerate(value):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        else:
            if kind == "range":
                kind = "op"
            if kind == "string" and "\n" in value:
                raise PipelineParseError(
                    "unterminated string", line, pos - line_start + 1
                )
            tokens.append(Token(kind, value, line, pos - line_start + 1))
        pos = match.end()
    tokens.append(Token("end", "", line, len(text) - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# syntax tree: expressions

Value = Union[float, int, str, bool]


@dataclass(frozen=True)
class Literal:
    value: Value


@dataclass(frozen=True)
class Attr:
    path: Tuple[str, ...]


@dataclass(frozen=True)
class Index:
    base: "Expr"
    index: int
    path: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Expr", ...]


@dataclass(frozen=True)
class Unary:
    op: str  # NOT | -
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # OR AND == != <= >= < > + - * /
    left: "Expr"
    right: "Expr"


Expr = Union[Literal, Attr, Index, Call, Unary, Binary]


# ---------------------------------------------------------------------------
# syntax tree: operations

@dataclass(frozen=True)
class Assignment:
    target: Tuple[str, ...]
    expr: Expr


@dataclass(frozen=True)
class AdjustDirective:
    words: Tuple[str, ...]
    values: Tuple[Value, ...]


@dataclass(frozen=True)
class ClassTerm:
    name: str
    quoted: bool = False


@dataclass(frozen=True)
class AdjustOp:
    directives: Tuple[AdjustDirective, ...]
    name = "adjust"


@dataclass(frozen=True)
class DeduceOp:
    categories: Tuple[str, ...]
    name = "deduce"


@dataclass(frozen=True)
class FilterOp:
    expr: Expr
    name = "filter"


@dataclass(frozen=True)
class IsaOp:
    classes: Tuple[ClassTerm, ...]
    name = "isa"


@dataclass(frozen=True)
class PickOp:
    expr: Expr
    name = "pick"


@dataclass(frozen=True)
class SelectOp:
    relation_expr: Expr
    attribute_expr: Optional[Expr] = None
    name = "select"


@dataclass(frozen=True)
class SortOp:
    key: Tuple[str, ...]
    order: Optional[str] = None  # "<" ascending, ">" descending
    steps: Optional[int] = None  # written value; magnitude = backtrace depth
    name = "sort"


@dataclass(frozen=True)
class SliceOp:
    start: int
    stop: Optional[int] = None  # inclusive 1-based stop for ranges
    name = "slice"


@dataclass(frozen=True)
class CalcOp:
    assignments: Tuple[Assignment, ...]
    name = "calc"


@dataclass(frozen=True)
class MapOp:
    assignments: Tuple[Assignment, ...]
    name = "map"


@dataclass(frozen=True)
class ProduceOp:
    kind: str
    assignments: Tuple[Assignment, ...] = ()
    name = "produce"


@dataclass(frozen=True)
class BacktraceOp:
    steps: int
    name = "backtrace"


@dataclass(frozen=True)
class ReloadOp:
    name = "reload"


@dataclass(frozen=True)
class HaltOp:
    name = "halt"


@dataclass(frozen=True)
class LogOp:
    args: Tuple[str, ...] = ()
    name = "log"


Operation = Union[
    AdjustOp, DeduceOp, FilterOp, IsaOp, PickOp, SelectOp, SortOp, SliceOp,
    CalcOp, MapOp, ProduceOp, BacktraceOp, ReloadOp, HaltOp, LogOp,
]


@dataclass(frozen=True)
class Pipeline:
    operations: Tuple[Operation, ...] = ()

    def to_text(self) -> str:
        return " | ".join(op_text(op) for op in self.operations)


# ---------------------------------------------------------------------------
# parser

_KEYWORDS = {"AND", "OR", "NOT", "TRUE", "FALSE"}


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- plumbing --------------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "end":
            self.pos += 1
        return tok

    def fail(self, message: str, tok: Optional[Token] = None) -> None:
        tok = tok or self.peek()
        raise PipelineParseError(message, tok.line, tok.column)

    def expect_op(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind != "op" or tok.text != text:
            self.fail("expected %r" % text)
        return self.advance()

    def expect_word(self, what: str = "name") -> Token:
        tok = self.peek()
        if tok.kind != "word":
            self.fail("expected %s" % what)
        return self.advance()

    def at_op(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text == text

    def keyword(self, tok: Token) -> Optional[str]:
        upper = tok.text.upper()
        return upper if tok.kind == "word" and upper in _KEYWORDS else None

    # -- pipeline --------------------------------------------------------

    def parse_pipeline(self) -> Pipeline:
        if self.peek().kind == "end":
            return Pipeline(())
        ops = [self.parse_operation()]
        while self.at_op("|"):
            self.advance()
            ops.append(self.parse_operation())
        tok = self.peek()
        if tok.kind != "end":
            self.fail("expected '|' or end of pipeline, got %r" % tok.text)
        return Pipeline(tuple(ops))

    def parse_operation(self) -> Operation:
        tok = self.expect_word("operation name")
        name = tok.text.lower()
        parser = getattr(self, "_op_" + name, None)
        if parser is None:
            self.fail("unknown operation %r" % tok.text, tok)
        self.expect_op("(")
        op = parser(tok)
        self.expect_op(")")
        return op

    # -- operation argument parsers ---------------------------------------

    def _op_adjust(self, tok: Token) -> AdjustOp:
        directives = [self._adjust_directive()]
        while self.at_op(";"):
            self.advance()
            directives.append(self._adjust_directive())
        return AdjustOp(tuple(directives))

    def _adjust_directive(self) -> AdjustDirective:
        words: List[str] = []
        while self.peek().kind == "word":
            words.append(self.advance().text)
        if not words:
            self.fail("adjust directive must start with a name")
        values: List[Value] = []
        while True:
            sign = 1
            if self.at_op("-"):
                self.advance()
                sign = -1
            if self.peek().kind != "number":
                if sign < 0:
                    self.fail("expected a number after '-'")
                break
            values.append(sign * _number(self.advance().text))
        return AdjustDirective(tuple(words), tuple(values))

    def _op_deduce(self, tok: Token) -> DeduceOp:
        names: List[str] = []
        while self.peek().kind == "word":
            names.append(self.advance().text.lower())
        if not names:
            self.fail("deduce needs at least one category name")
        return DeduceOp(tuple(names))

    def _op_filter(self, tok: Token) -> FilterOp:
        return FilterOp(self.parse_expression())

    def _op_isa(self, tok: Token) -> IsaOp:
        terms = [self._class_term()]
        while True:
            nxt = self.peek()
            if self.keyword(nxt) == "OR" or (nxt.kind == "op" and nxt.text == "||"):
                self.advance()
                terms.append(self._class_term())
            else:
                break
        return IsaOp(tuple(terms))

    def _class_term(self) -> ClassTerm:
        tok = self.peek()
        if tok.kind == "string":
            self.advance()
            return ClassTerm(tok.text[1:-1], quoted=True)
        if tok.kind == "word":
            self.advance()
            return ClassTerm(tok.text, quoted=False)
        self.fail("expected a class name")

    def _op_pick(self, tok: Token) -> PickOp:
        return PickOp(self.parse_expression())

    def _op_select(self, tok: Token) -> SelectOp:
        relation = self.parse_expression()
        attribute = None
        if self.at_op("?"):
            self.advance()
            attribute = self.parse_expression()
        return SelectOp(relation, attribute)

    def _op_sort(self, tok: Token) -> SortOp:
        key = [self.expect_word("sort key").text.lower()]
        while self.at_op("."):
            self.advance()
            key.append(self.expect_word("metric name").text.lower())
        order: Optional[str] = None
        steps: Optional[int] = None
        if self.at_op("<") or self.at_op(">"):
            order = self.advance().text
            sign = 1
            if self.at_op("-"):
                self.advance()
                sign = -1
            if self.peek().kind == "number":
                steps_tok = self.peek()
                steps = sign * self._integer(self.advance())
                if steps == 0:
                    self.fail("backtrace depth must be non-zero", steps_tok)
            elif sign < 0:
                self.fail("expected a number after '-'")
        return SortOp(tuple(key), order, steps)

    def _op_slice(self, tok: Token) -> SliceOp:
        sign = 1
        if self.at_op("-"):
            self.advance()
            sign = -1
        first_tok = self.peek()
        first = sign * self._integer(self.advance())
        if first == 0:
            self.fail("slice index is 1-based and must be non-zero", first_tok)
        if self.at_op(".."):
            self.advance()
            if first < 0:
                self.fail("range bounds must be positive", first_tok)
            stop_tok = self.peek()
            stop = self._integer(self.advance())
            if stop <= 0:
                self.fail("range bounds must be positive", stop_tok)
            return SliceOp(first, stop)
        return SliceOp(first)

    def _integer(self, tok: Token) -> int:
        if tok.kind != "number" or not re.fullmatch(r"\d+", tok.text):
            self.fail("expected an integer", tok)
        return int(tok.text)

    def _op_calc(self, tok: Token) -> CalcOp:
        return CalcOp(self._assignments())

    def _op_map(self, tok: Token) -> MapOp:
        return MapOp(self._assignments())

    def _assignments(self) -> Tuple[Assignment, ...]:
        out = [self._assignment()]
        while self.at_op(";"):
            self.advance()
            out.append(self._assignment())
        return tuple(out)

    def _assignment(self) -> Assignment:
        path = [self.expect_word("attribute name").text]
        while self.at_op("."):
            self.advance()
            path.append(self.expect_word("attribute name").text)
        self.expect_op("=")
        return Assignment(tuple(path), self.parse_expression())

    def _op_produce(self, tok: Token) -> ProduceOp:
        kind = self.expect_word("production kind").text.lower()
        assignments: Tuple[Assignment, ...] = ()
        if self.at_op(":"):
            self.advance()
            assignments = self._assignments()
        return ProduceOp(kind, assignments)

    def _op_backtrace(self, tok: Token) -> BacktraceOp:
        sign = 1
        if self.at_op("-"):
            self.advance()
            sign = -1
        steps_tok = self.peek()
        steps = sign * self._integer(self.advance())
        if steps == 0:
            self.fail("backtrace of zero steps is meaningless", steps_tok)
        return BacktraceOp(steps)

    def _op_reload(self, tok: Token) -> ReloadOp:
        return ReloadOp()

    def _op_halt(self, tok: Token) -> HaltOp:
        return HaltOp()

    def _op_log(self, tok: Token) -> LogOp:
        args: List[str] = []
        while self.peek().kind == "word":
            args.append(self.advance().text)
        return LogOp(tuple(args))

    # -- expressions -------------------------------------------------------

    def parse_expression(self) -> Expr:
        return self._or_expr()

    def _or_expr(self) -> Expr:
        left = self._and_expr()
        while True:
            tok = self.peek()
            if self.keyword(tok) == "OR" or (tok.kind == "op" and tok.text == "||"):
                self.advance()
                left = Binary("OR", left, self._and_expr())
            else:
                return left

    def _and_expr(self) -> Expr:
        left = self._not_expr()
        while True:
            tok = self.peek()
            if self.keyword(tok) == "AND" or (tok.kind == "op" and tok.text == "&&"):
                self.advance()
                left = Binary("AND", left, self._not_expr())
            else:
                return left

    def _not_expr(self) -> Expr:
        if self.keyword(self.peek()) == "NOT":
            self.advance()
            return Unary("NOT", self._not_expr())
        return self._comparison()

    def _comparison(self) -> Expr:
        left = self._sum()
        tok = self.peek()
        if tok.kind == "op" and tok.text in ("==", "!=", "<=", ">=", "<", ">"):
            self.advance()
            return Binary(tok.text, left, self._sum())
        return left

    def _sum(self) -> Expr:
        left = self._term()
        while self.at_op("+") or self.at_op("-"):
            op = self.advance().text
            left = Binary(op, left, self._term())
        return left

    def _term(self) -> Expr:
        left = self._factor()
        while self.at_op("*") or self.at_op("/"):
            op = self.advance().text
            left = Binary(op, left, self._factor())
        return left

    def _factor(self) -> Expr:
        if self.at_op("-"):
            self.advance()
            return Unary("-", self._factor())
        return self._postfix()

    def _postfix(self) -> Expr:
        expr = self._primary()
        while True:
            if self.at_op("["):
                self.advance()
                idx = self._integer(self.advance())
                self.expect_op("]")
                expr = Index(expr, idx)
            elif self.at_op("."):
                self.advance()
                name = self.expect_word("attribute name").text
                if isinstance(expr, Attr):
                    expr = Attr(expr.path + (name,))
                elif isinstance(expr, Index):
                    expr = Index(expr.base, expr.index, expr.path + (name,))
                else:
                    self.fail("'.' may only follow a name or index")
            else:
                return expr

    def _primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Literal(_number(tok.text))
        if tok.kind == "string":
            self.advance()
            return Literal(tok.text[1:-1])
        if tok.kind == "word":
            kw = self.keyword(tok)
            if kw == "TRUE":
                self.advance()
                return Literal(True)
            if kw == "FALSE":
                self.advance()
                return Literal(False)
            if kw is not None:
                self.fail("unexpected keyword %r" % tok.text, tok)
            self.advance()
            if self.at_op("("):
                self.advance()
                args: List[Expr] = []
                if not self.at_op(")"):
                    args.append(self.parse_expression())
                    while self.at_op(","):
                        self.advance()
                        args.append(self.parse_expression())
                self.expect_op(")")
                return Call(tok.text.lower(), tuple(args))
            return Attr((tok.text,))
        if self.at_op("("):
            self.advance()
            inner = self.parse_expression()
            self.expect_op(")")
            return inner
        self.fail("expected an expression, got %r" % (tok.text or "end of input"))


def _number(text: str) -> Value:
    return int(text) if re.fullmatch(r"\d+", text) else float(text)


def parse_pipeline(text: str) -> Pipeline:
    """Parse pipeline text into a tree; raises PipelineParseError."""
    return _Parser(tokenize(text)).parse_pipeline()


# ---------------------------------------------------------------------------
# printer

_PRECEDENCE = {
    "OR": 1, "AND": 2,
    "==": 4, "!=": 4, "<=": 4, ">=": 4, "<": 4, ">": 4,
    "+": 5, "-": 5, "*": 6, "/": 6,
}
_COMPARISONS = ("==", "!=", "<=", ">=", "<", ">")


def literal_text(value: Value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return "'%s'" % value
    return repr(value)


def expr_text(expr: Expr, parent: int = 0) -> str:
    if isinstance(expr, Literal):
        return literal_text(expr.value)
    if isinstance(expr, Attr):
        return ".".join(expr.path)
    if isinstance(expr, Index):
        text = "%s[%d]" % (expr_text(expr.base, 8), expr.index)
        return ".".join((text,) + expr.path)
    if isinstance(expr, Call):
        return "%s(%s)" % (expr.name, ", ".join(expr_text(a) for a in expr.args))
    if isinstance(expr, Unary):
        # prefix operators need parentheses inside any tighter context
        if expr.op == "NOT":
            prec, text = 3, "NOT %s" % expr_text(expr.operand, 3)
        else:
            prec, text = 7, "-%s" % expr_text(expr.operand, 7)
        return "(%s)" % text if prec <= parent else text
    if isinstance(expr, Binary):
        prec = _PRECEDENCE[expr.op]
        # comparisons do not chain, so a comparison child needs parentheses
        left = expr_text(expr.left, prec if expr.op in _COMPARISONS else prec - 1)
        right = expr_text(expr.right, prec)
        text = "%s %s %s" % (left, expr.op, right)
        return "(%s)" % text if prec <= parent else text
    raise TypeError("not an expression: %r" % (expr,))


def _assignments_text(assignments: Sequence[Assignment]) -> str:
    return "; ".join(
        "%s = %s" % (".".join(a.target), expr_text(a.expr)) for a in assignments
    )


def op_text(op: Operation) -> str:
    if isinstance(op, AdjustOp):
        parts = []
        for d in op.directives:
            chunk = " ".join(d.words)
            if d.values:
                chunk += " " + " ".join(literal_text(v) for v in d.values)
            parts.append(chunk)
        return "adjust(%s)" % "; ".join(parts)
    if isinstance(op, DeduceOp):
        return "deduce(%s)" % " ".join(op.categories)
    if isinstance(op, FilterOp):
        return "filter(%s)" % expr_text(op.expr)
    if isinstance(op, IsaOp):
        terms = " OR ".join(
            "'%s'" % t.name if t.quoted else t.name for t in op.classes
        )
        return "isa(%s)" % terms
    if isinstance(op, PickOp):
        return "pick(%s)" % expr_text(op.expr)
    if isinstance(op, SelectOp):
        text = expr_text(op.relation_expr)
        if op.attribute_expr is not None:
            text += " ? " + expr_text(op.attribute_expr)
        return "select(%s)" % text
    if isinstance(op, SortOp):
        text = ".".join(op.key)
        if op.order is not None:
            text += " " + op.order
        if op.steps is not None:
            text += " %d" % op.steps
        return "sort(%s)" % text
    if isinstance(op, SliceOp):
        if op.stop is not None:
            return "slice(%d..%d)" % (op.start, op.stop)
        return "slice(%d)" % op.start
    if isinstance(op, CalcOp):
        return "calc(%s)" % _assignments_text(op.assignments)
    if isinstance(op, MapOp):
        return "map(%s)" % _assignments_text(op.assignments)
    if isinstance(op, ProduceOp):
        if op.assignments:
            return "produce(%s : %s)" % (op.kind, _assignments_text(op.assignments))
        return "produce(%s)" % op.kind
    if isinstance(op, BacktraceOp):
        return "backtrace(%d)" % op.steps
    if isinstance(op, ReloadOp):
        return "reload()"
    if isinstance(op, HaltOp):
        return "halt()"
    if isinstance(op, LogOp):
        return "log(%s)" % " ".join(op.args)
    raise TypeError("not an operation: %r" % (op,))


def pipeline_text(pipeline: Pipeline) -> str:
    return pipeline.to_text()
