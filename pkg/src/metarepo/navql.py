"""NavQL: a small textual DSL for scripting metadata/data navigation.

A query names a starting set of concepts, follows a chain of navigation
methods, optionally pins the time of interest, and may end in a warehouse
aggregation over the measures it reached::

    InternalEntity(name="Banking Supervision Department").getGoals().getMeasures() ASOF 2001-03-31
    #npa.history()
    #measure_npa.data(avg(npa_ratio) BY Bank.bank_type FROM 2000-01-01 TO 2001-01-01)

Grammar (EBNF)::

    query    = start { "." step } [ temporal ] [ "." dataTail ] ;
    start    = KIND "(" [ pred { "," pred } ] ")" | "#" ID ;
    pred     = ATTR "=" STRING ;
    step     = METHOD "(" ")" | "history" "(" ")" ;
    temporal = "ASOF" DATE | "DURING" "[" DATE "," DATE ")" ;
    dataTail = "data" "(" agg { "," agg } [ "BY" ATTRREF { "," ATTRREF } ]
               [ "WHERE" dpred { "AND" dpred } ] [ "FROM" DATE "TO" DATE ] ")" ;
    agg      = ("sum"|"avg"|"min"|"max"|"count") "(" COLUMN ")" ;
    dpred    = ATTRREF ("="|"!="|"<"|"<="|">"|">=") literal ;

KIND is a concept kind name, METHOD a navigation method, ATTRREF a
dimension.attribute pair, DATE a YYYY-MM-DD literal. Parsing is recursive
descent with single-token lookahead; the first error wins and carries the
byte offset plus the expected-token set. A canonical printer round-trips
every AST.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import date

from .errors import MetarepoError, NotFoundError, QueryError
from .linkage import NAV_DISPATCH, Repository
from .model import ConceptKind, ConceptVersion, ValidInterval
from .warehouse import AGG_FNS, QueryResult

Literal = str | int | float | date


class ParseError(MetarepoError):
    """Positioned parse failure: byte offset plus the expected-token set."""

    def __init__(self, offset: int, expected: tuple[str, ...], message: str | None = None):
        self.offset = offset
        self.expected = tuple(expected)
        if message is None:
            message = f"expected {' or '.join(expected)}" if expected else "invalid syntax"
        super().__init__(f"parse error at offset {offset}: {message}")


# -- AST ---------------------------------------------------------------------


@dataclass(frozen=True)
class KindSelector:
    kind: ConceptKind
    preds: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class IdRef:
    logical_id: str


@dataclass(frozen=True)
class MethodStep:
    name: str


@dataclass(frozen=True)
class HistoryStep:
    pass


@dataclass(frozen=True)
class AsOf:
    t: date


@dataclass(frozen=True)
class During:
    window: ValidInterval


@dataclass(frozen=True)
class AttrRef:
    dimension: str
    attr: str


@dataclass(frozen=True)
class DataPred:
    ref: AttrRef
    op: str
    value: Literal


@dataclass(frozen=True)
class DataSpec:
    aggs: tuple[tuple[str, str], ...]
    group_by: tuple[AttrRef, ...] = ()
    where: tuple[DataPred, ...] = ()
    time_range: ValidInterval | None = None


@dataclass(frozen=True)
class NavQuery:
    start: KindSelector | IdRef
    chain: tuple[MethodStep | HistoryStep, ...] = ()
    temporal: AsOf | During | None = None
    data_tail: DataSpec | None = None


# -- lexer -------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<WS>\s+)
      | (?P<DATE>\d{4}-\d{2}-\d{2})
      | (?P<NUMBER>-?\d+(?:\.\d+)?)
      | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<HASH>\#[A-Za-z0-9_\-]+)
      | (?P<STRING>"(?:[^"\\\n]|\\.)*")
      | (?P<OP><=|>=|!=|=|<|>)
      | (?P<PUNCT>[.(),\[\]])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    type: str  # DATE NUMBER IDENT HASH STRING OP PUNCT EOF
    text: str
    offset: int  # character offset; converted to bytes when reported


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _decode_string(raw: str, text: str, offset: int) -> str:
    out = []
    i = 1
    body = raw[:-1]
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            esc = body[i + 1]
            if esc not in ('"', "\\"):
                raise ParseError(
                    _byte_offset(text, offset + i), (), f"invalid escape '\\{esc}'"
                )
            out.append(esc)
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _lex(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            if text[pos] == '"':
                raise ParseError(_byte_offset(text, pos), (), "unterminated string literal")
            raise ParseError(
                _byte_offset(text, pos), (), f"unexpected character {text[pos]!r}"
            )
        kind = match.lastgroup
        assert kind is not None
        if kind != "WS":
            tokens.append(_Token(kind, match.group(), match.start()))
        pos = match.end()
    tokens.append(_Token("EOF", "", len(text)))
    return tokens


# -- parser ------------------------------------------------------------------

_KIND_NAMES = {k.value for k in ConceptKind}
_END = "end of query"


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _lex(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        token = self.tokens[self.i]
        self.i += 1
        return token

    def fail(self, expected: tuple[str, ...], token: _Token | None = None) -> None:
        token = token or self.peek()
        raise ParseError(_byte_offset(self.text, token.offset), expected)

    def expect_punct(self, ch: str) -> _Token:
        token = self.peek()
        if token.type != "PUNCT" or token.text != ch:
            self.fail((f"'{ch}'",))
        return self.advance()

    def expect_date(self) -> date:
        token = self.peek()
        if token.type != "DATE":
            self.fail(("DATE",))
        self.advance()
        try:
            return date.fromisoformat(token.text)
        except ValueError:
            raise ParseError(
                _byte_offset(self.text, token.offset), (), f"invalid date {token.text!r}"
            ) from None

    def at_punct(self, ch: str) -> bool:
        token = self.peek()
        return token.type == "PUNCT" and token.text == ch

    def at_keyword(self, word: str) -> bool:
        token = self.peek()
        return token.type == "IDENT" and token.text == word

    # query = start { "." step } [ temporal ] [ "." dataTail ]
    def query(self) -> NavQuery:
        start = self.start()
        chain: list[MethodStep | HistoryStep] = []
        data_tail = None
        saw_history = False
        while self.at_punct("."):
            self.advance()
            token = self.peek()
            if token.type != "IDENT":
                self.fail(("METHOD", "'history'", "'data'"))
            if token.text == "data":
                data_tail = self.data_tail(saw_history)
                break
            if saw_history:
                self.fail((_END,), token)
            self.advance()
            self.expect_punct("(")
            self.expect_punct(")")
            if token.text == "history":
                chain.append(HistoryStep())
                saw_history = True
            elif token.text in NAV_DISPATCH:
                chain.append(MethodStep(token.text))
            else:
                self.fail(("METHOD", "'history'", "'data'"), token)
        temporal = None
        if data_tail is None:
            temporal = self.temporal()
            if self.at_punct("."):
                self.advance()
                token = self.peek()
                if token.type != "IDENT" or token.text != "data":
                    self.fail(("'data'",))
                data_tail = self.data_tail(saw_history)
        token = self.peek()
        if token.type != "EOF":
            self.fail((_END,), token)
        return NavQuery(start=start, chain=tuple(chain), temporal=temporal, data_tail=data_tail)

    # start = KIND "(" [ pred { "," pred } ] ")" | "#" ID
    def start(self) -> KindSelector | IdRef:
        token = self.peek()
        if token.type == "HASH":
            self.advance()
            return IdRef(token.text[1:])
        if token.type != "IDENT" or token.text not in _KIND_NAMES:
            self.fail(("KIND", "'#id'"), token)
        self.advance()
        self.expect_punct("(")
        preds: list[tuple[str, str]] = []
        if not self.at_punct(")"):
            while True:
                attr = self.peek()
                if attr.type != "IDENT":
                    self.fail(("ATTR", "')'"), attr)
                self.advance()
                op = self.peek()
                if op.type != "OP" or op.text != "=":
                    self.fail(("'='",), op)
                self.advance()
                value = self.peek()
                if value.type != "STRING":
                    self.fail(("STRING",), value)
                self.advance()
                preds.append((attr.text, _decode_string(value.text, self.text, value.offset)))
                if self.at_punct(","):
                    self.advance()
                    continue
                break
        self.expect_punct(")")
        return KindSelector(kind=ConceptKind(token.text), preds=tuple(preds))

    # temporal = "ASOF" DATE | "DURING" "[" DATE "," DATE ")"
    def temporal(self) -> AsOf | During | None:
        if self.at_keyword("ASOF"):
            self.advance()
            return AsOf(self.expect_date())
        if self.at_keyword("DURING"):
            self.advance()
            self.expect_punct("[")
            lo = self.expect_date()
            self.expect_punct(",")
            hi_token = self.peek()
            hi = self.expect_date()
            self.expect_punct(")")
            if hi <= lo:
                raise ParseError(
                    _byte_offset(self.text, hi_token.offset), (),
                    "window end must follow its start",
                )
            return During(ValidInterval(lo, hi))
        return None

    # dataTail = "data" "(" agg { "," agg } [BY ...] [WHERE ...] [FROM ... TO ...] ")"
    def data_tail(self, saw_history: bool) -> DataSpec:
        token = self.advance()  # the 'data' ident
        if saw_history:
            raise ParseError(
                _byte_offset(self.text, token.offset), (_END,),
                "a data tail cannot follow history()",
            )
        self.expect_punct("(")
        aggs = [self.agg()]
        while self.at_punct(","):
            self.advance()
            aggs.append(self.agg())
        group_by: list[AttrRef] = []
        where: list[DataPred] = []
        time_range = None
        if self.at_keyword("BY"):
            self.advance()
            group_by.append(self.attr_ref())
            while self.at_punct(","):
                self.advance()
                group_by.append(self.attr_ref())
        if self.at_keyword("WHERE"):
            self.advance()
            where.append(self.dpred())
            while self.at_keyword("AND"):
                self.advance()
                where.append(self.dpred())
        if self.at_keyword("FROM"):
            self.advance()
            lo = self.expect_date()
            if not self.at_keyword("TO"):
                self.fail(("'TO'",))
            self.advance()
            hi_token = self.peek()
            hi = self.expect_date()
            if hi <= lo:
                raise ParseError(
                    _byte_offset(self.text, hi_token.offset), (),
                    "range end must follow its start",
                )
            time_range = ValidInterval(lo, hi)
        self.expect_punct(")")
        return DataSpec(
            aggs=tuple(aggs), group_by=tuple(group_by),
            where=tuple(where), time_range=time_range,
        )

    def agg(self) -> tuple[str, str]:
        token = self.peek()
        if token.type != "IDENT" or token.text not in AGG_FNS:
            self.fail(("AGGREGATE",), token)
        self.advance()
        self.expect_punct("(")
        column = self.peek()
        if column.type != "IDENT":
            self.fail(("COLUMN",), column)
        self.advance()
        self.expect_punct(")")
        return token.text, column.text

    def attr_ref(self) -> AttrRef:
        dimension = self.peek()
        if dimension.type != "IDENT":
            self.fail(("ATTRREF",), dimension)
        self.advance()
        self.expect_punct(".")
        attr = self.peek()
        if attr.type != "IDENT":
            self.fail(("ATTR",), attr)
        self.advance()
        return AttrRef(dimension.text, attr.text)

    def dpred(self) -> DataPred:
        ref = self.attr_ref()
        op = self.peek()
        if op.type != "OP":
            self.fail(("COMPARISON",), op)
        self.advance()
        return DataPred(ref, op.text, self.literal())

    def literal(self) -> Literal:
        token = self.peek()
        if token.type == "STRING":
            self.advance()
            return _decode_string(token.text, self.text, token.offset)
        if token.type == "DATE":
            return self.expect_date()
        if token.type == "NUMBER":
            self.advance()
            return float(token.text) if "." in token.text else int(token.text)
        self.fail(("STRING", "NUMBER", "DATE"), token)
        raise AssertionError("unreachable")


def parse(text: str) -> NavQuery:
    """Parse a NavQL query; raises ParseError with byte offset and expected
    tokens on the first failure. Total over arbitrary input."""
    return _Parser(text).query()


# -- canonical printer ---------------------------------------------------------


def _print_string(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _print_literal(value: Literal) -> str:
    if isinstance(value, str):
        return _print_string(value)
    if isinstance(value, date):
        return value.isoformat()
    return repr(value)


def print_query(query: NavQuery) -> str:
    """Render an AST in canonical form; parse(print_query(q)) == q."""
    parts = []
    if isinstance(query.start, IdRef):
        parts.append(f"#{query.start.logical_id}")
    else:
        preds = ", ".join(f"{attr}={_print_string(v)}" for attr, v in query.start.preds)
        parts.append(f"{query.start.kind.value}({preds})")
    for step in query.chain:
        parts.append(".history()" if isinstance(step, HistoryStep) else f".{step.name}()")
    if isinstance(query.temporal, AsOf):
        parts.append(f" ASOF {query.temporal.t.isoformat()}")
    elif isinstance(query.temporal, During):
        window = query.temporal.window
        assert window.valid_to is not None
        parts.append(f" DURING [{window.valid_from.isoformat()}, {window.valid_to.isoformat()})")
    if query.data_tail is not None:
        tail = query.data_tail
        inner = ", ".join(f"{fn}({column})" for fn, column in tail.aggs)
        if tail.group_by:
            inner += " BY " + ", ".join(f"{r.dimension}.{r.attr}" for r in tail.group_by)
        if tail.where:
            inner += " WHERE " + " AND ".join(
                f"{p.ref.dimension}.{p.ref.attr} {p.op} {_print_literal(p.value)}"
                for p in tail.where
            )
        if tail.time_range is not None:
            assert tail.time_range.valid_to is not None
            inner += (
                f" FROM {tail.time_range.valid_from.isoformat()}"
                f" TO {tail.time_range.valid_to.isoformat()}"
            )
        parts.append(f".data({inner})")
    return "".join(parts)


# -- evaluator -----------------------------------------------------------------


@dataclass(frozen=True)
class ResultSet:
    """Concept versions reached by the query, ordered by logical id."""

    versions: tuple[ConceptVersion, ...]


@dataclass(frozen=True)
class HistoryResult:
    """Full version history of a single concept."""

    versions: tuple[ConceptVersion, ...]


def _match_preds(version: ConceptVersion, preds: tuple[tuple[str, str], ...]) -> bool:
    for attr, value in preds:
        if attr == "name":
            actual = version.name
        elif attr == "description":
            actual = version.description
        else:
            actual = version.attributes.get(attr)
        if actual is None or str(actual) != value:
            return False
    return True


def _latest_overlapping(versions: list[ConceptVersion], window: ValidInterval):
    hit = None
    for version in versions:
        if version.interval.overlaps(window):
            hit = version
    return hit


def evaluate(
    query: NavQuery, repo: Repository, now: date
) -> ResultSet | HistoryResult | QueryResult:
    """Run a parsed query against a repository snapshot.

    The temporal qualifier defaults to ASOF `now`. Each method step maps the
    current set through the navigation dispatch (point or overlap semantics);
    history() requires a singleton set; a data tail resolves the measures'
    fact link and runs the warehouse aggregation.
    """
    temporal = query.temporal or AsOf(now)
    if isinstance(temporal, AsOf):
        window = None
        t = temporal.t
    else:
        window = temporal.window
        t = window.valid_from

    # start set
    if isinstance(query.start, IdRef):
        logical_id = query.start.logical_id
        if not repo.store.exists(logical_id):
            raise NotFoundError(f"unknown concept '{logical_id}'")
        ids = {logical_id}
    else:
        ids = set()
        for logical_id in repo.store.ids_of_kind(query.start.kind):
            versions = repo.store.concepts[logical_id]
            if window is None:
                version = repo.store.get_as_of(logical_id, t)
            else:
                version = _latest_overlapping(versions, window)
            if version is not None and _match_preds(version, query.start.preds):
                ids.add(logical_id)

    # method chain
    history: tuple[ConceptVersion, ...] | None = None
    for step in query.chain:
        if isinstance(step, HistoryStep):
            if len(ids) != 1:
                raise QueryError(
                    f"history() requires exactly one concept, got {len(ids)}"
                )
            history = tuple(repo.store.get_history(next(iter(ids))))
        else:
            hopped: set[str] = set()
            for logical_id in ids:
                if window is None:
                    hopped |= repo.navigate(logical_id, step.name, t)
                else:
                    hopped |= repo.navigate_during(logical_id, step.name, window)
            ids = hopped
    if history is not None:
        return HistoryResult(history)

    # data tail
    if query.data_tail is not None:
        tail = query.data_tail
        resolved = set()
        for logical_id in sorted(ids):
            if repo.store.kind_of(logical_id) is not ConceptKind.MEASURE:
                raise QueryError(
                    f"data() requires Measure concepts, "
                    f"'{logical_id}' is {repo.store.kind_of(logical_id).value}"
                )
            resolved.add(repo.get_facts(logical_id, t))
        if not resolved:
            raise QueryError("data() requires at least one measure")
        if len({fact for fact, _ in resolved}) > 1:
            raise QueryError(
                "measures map to different fact tables: "
                + ", ".join(sorted(fact for fact, _ in resolved))
            )
        if len(resolved) > 1:
            raise QueryError(
                "measures map to different columns: "
                + ", ".join(sorted(column for _, column in resolved))
            )
        fact, _ = next(iter(resolved))
        return repo.warehouse.query_facts(
            fact,
            where=[(p.ref.dimension, p.ref.attr, p.op, p.value) for p in tail.where],
            group_by=[(r.dimension, r.attr) for r in tail.group_by],
            agg=list(tail.aggs),
            time_range=tail.time_range,
        )

    # materialize versions
    versions = []
    for logical_id in sorted(ids):
        if window is None:
            version = repo.store.get_as_of(logical_id, t)
        else:
            version = _latest_overlapping(repo.store.concepts[logical_id], window)
        if version is not None:
            versions.append(version)
    return ResultSet(tuple(versions))


def run(text: str, repo: Repository, now: date) -> ResultSet | HistoryResult | QueryResult:
    """Parse and evaluate in one call."""
    return evaluate(parse(text), repo, now)


def encode_result(result: ResultSet | HistoryResult | QueryResult) -> dict:
    """JSON shape shared by the CLI and the HTTP API."""
    from .serialize import encode_concept, encode_query_result

    if isinstance(result, ResultSet):
        return {"type": "concepts", "items": [encode_concept(v) for v in result.versions]}
    if isinstance(result, HistoryResult):
        return {"type": "history", "items": [encode_concept(v) for v in result.versions]}
    return {"type": "table", **encode_query_result(result)}
