"""Pipeline evaluation over a fact base.

Evaluation threads a working set of objects through the operations of a
parsed pipeline.  The history of working sets is kept in a chain:
``chain[0]`` is the initial input and ``chain[i]`` is the input of
operation ``i``, so ``backtrace(s)`` and the reference resolution of
``sort`` simply look up ``chain[i - s]`` (clamped at the start).

Operations that need relations (``pick``, ``select``, relation keyed
``sort``, zone ``produce``) deduce the categories they require on demand
and leave the results in the fact base.  ``adjust`` replaces the active
settings and invalidates every stored relation.

Expression evaluation is total: a name that does not resolve yields the
absent marker, which fails every comparison and is falsy, so malformed
attribute tests drop objects instead of crashing.  Structural mistakes
(unknown operations, predicates in ``filter``, assigning ``id`` in
``map``) raise :class:`PipelineRuntimeError` tagged with the 1-based
step index.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .dsl import (
    AdjustOp, Assignment, Attr, BacktraceOp, Binary, CalcOp, Call, DeduceOp,
    Expr, FilterOp, HaltOp, Index, IsaOp, Literal, LogOp, MapOp, Pipeline,
    PickOp, ProduceOp, ReloadOp, SelectOp, SliceOp, SortOp, Unary,
)
from .geometry import contact_region, enclosing_box, sector_region
from .model import (
    ABSENT, AdjustmentSettings, FactBase, NEARBY_SCHEMAS, SECTOR_SCHEMAS,
    SpatialObject, derive_attributes,
)
from .relations import (
    PREDICATE_CATEGORY, SECTOR_CODES, canonical_predicate,
    categories_for_predicates, ensure_categories, deduce,
)
from .taxonomy import Taxonomy


class PipelineRuntimeError(RuntimeError):
    """Evaluation failure, tagged with the 1-based step it occurred in."""

    def __init__(self, message: str, step: Optional[int] = None,
                 operation: Optional[str] = None):
        if step is not None:
            message = "step %d (%s): %s" % (step, operation, message)
        super().__init__(message)
        self.step = step
        self.operation = operation


@dataclass(frozen=True)
class LogEntry:
    step: int  # 1-based pipeline step that emitted the entry
    kind: str  # summary | mermaid | scene | facts
    text: str


@dataclass
class PipelineResult:
    objects: Tuple[SpatialObject, ...]
    chain: Tuple[Tuple[SpatialObject, ...], ...]
    settings: AdjustmentSettings
    halted: bool = False
    logs: Tuple[LogEntry, ...] = ()


_RELATION_METRICS = ("delta", "angle")

# object fields and derived quantities exposed to expressions
_OBJECT_FIELDS = frozenset(
    "id x y z w h d angle label type velocity virtual moving observer".split()
)
_OBJECT_PROPERTIES = frozenset(
    "volume perimeter length radius surface front_area side_area top yaw "
    "footprint is_moving shape position center".split()
)
_DERIVED_FLAGS = frozenset(("equilateral", "long", "thin"))
_ATTRIBUTE_ALIASES = {"height": "h", "width": "w", "depth": "d"}
_NUMERIC_FIELDS = frozenset("x y z w h d angle velocity".split())
_FLAG_FIELDS = frozenset(("virtual", "moving", "observer"))
_TEXT_FIELDS = frozenset(("label", "type"))

_PRODUCE_PAIR_KINDS = ("on", "at", "by", "in")
_SYMMETRIC_ZONES = ("at", "by")


def _is_number(value: object) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _truthy(value: object) -> bool:
    return value is not ABSENT and bool(value)


class _Scope:
    """Name resolution for one expression context."""

    def resolve(self, path: Tuple[str, ...]):
        raise NotImplementedError

    def call(self, name: str, args: List[object]):
        if name == "abs" and len(args) == 1 and _is_number(args[0]):
            return abs(args[0])
        if name == "round" and len(args) in (1, 2) and all(map(_is_number, args)):
            return round(*args)
        if name in ("min", "max") and len(args) >= 2 and all(map(_is_number, args)):
            return (min if name == "min" else max)(args)
        if any(a is ABSENT for a in args):
            return ABSENT
        raise PipelineRuntimeError("unknown function %r" % name)


def _object_field(obj: SpatialObject, path: Tuple[str, ...]):
    head = _ATTRIBUTE_ALIASES.get(path[0], path[0])
    rest = path[1:]
    if head == "custom":
        return _navigate(dict(obj.custom), rest)
    if head == "confidence":
        return _navigate(dict(obj.confidence), rest)
    if head in _OBJECT_FIELDS or head in _OBJECT_PROPERTIES:
        return _navigate(getattr(obj, head), rest)
    if head in obj.custom:
        return _navigate(obj.custom[head], rest)
    return ABSENT


class _ObjectScope(_Scope):
    def __init__(self, obj: SpatialObject, fb: FactBase,
                 settings: AdjustmentSettings, forbid_predicates: bool = False):
        self.obj = obj
        self.fb = fb
        self.settings = settings
        self.forbid_predicates = forbid_predicates

    def resolve(self, path: Tuple[str, ...]):
        head = _ATTRIBUTE_ALIASES.get(path[0], path[0])
        if head in _DERIVED_FLAGS:
            flags = derive_attributes(self.obj, self.settings)
            return _navigate(getattr(flags, head), path[1:])
        value = _object_field(self.obj, path)
        if value is not ABSENT:
            return value
        if path[0] in self.fb.variables:
            return _navigate(self.fb.variables[path[0]], path[1:])
        if self.forbid_predicates and _is_predicate(path[0]):
            raise PipelineRuntimeError(
                "%r is a relation predicate; use pick() or select() to test "
                "relations" % path[0]
            )
        return ABSENT


class _RelationScope(_Scope):
    """Predicates and their metrics for one (subject, object) pair."""

    def __init__(self, fb: FactBase, subject: str, obj: str):
        self.fb = fb
        self.subject = subject
        self.object = obj

    def resolve(self, path: Tuple[str, ...]):
        predicate = canonical_predicate(path[0])
        if predicate not in PREDICATE_CATEGORY:
            raise PipelineRuntimeError(
                "unknown predicate %r in relation expression" % path[0]
            )
        relation = self.fb.relation(self.subject, predicate, self.object)
        if len(path) == 1:
            return relation is not None
        if len(path) == 2 and path[1] in _RELATION_METRICS:
            return ABSENT if relation is None else getattr(relation, path[1])
        raise PipelineRuntimeError(
            "relation metric must be one of %s, got %r"
            % (", ".join(_RELATION_METRICS), ".".join(path[1:]))
        )


class _CalcScope(_Scope):
    """The working set (as ``objects``), aggregates, and stored variables."""

    _AGGREGATES = ("sum", "min", "max", "median", "average", "count")

    def __init__(self, objects: Sequence[SpatialObject], fb: FactBase,
                 settings: AdjustmentSettings):
        self.objects = objects
        self.fb = fb
        self.settings = settings

    def resolve(self, path: Tuple[str, ...]):
        if path == ("count",):
            return len(self.objects)
        head, rest = path[0], path[1:]
        if head == "objects":
            if not rest:
                return list(self.objects)
            return [_object_field(obj, rest) for obj in self.objects]
        if head in self.fb.variables:
            return _navigate(self.fb.variables[head], rest)
        raise PipelineRuntimeError("unknown name %r in calc" % ".".join(path))

    def call(self, name: str, args: List[object]):
        if name not in self._AGGREGATES:
            return super().call(name, args)
        if len(args) == 1 and isinstance(args[0], (list, tuple)):
            pool: List[object] = list(args[0])
        else:
            pool = args
        if name == "count":
            return len(pool) if args else len(self.objects)
        values = [v for v in pool if _is_number(v)]
        if not values:
            if name == "sum":
                return 0
            raise PipelineRuntimeError("%s() over an empty collection" % name)
        if name == "sum":
            return sum(values)
        if name == "min":
            return min(values)
        if name == "max":
            return max(values)
        if name == "median":
            return statistics.median(values)
        return sum(values) / len(values)


def _navigate(value: object, rest: Tuple[str, ...]):
    if not rest:
        return value
    if isinstance(value, SpatialObject):
        return _object_field(value, rest)
    if isinstance(value, dict) and rest[0] in value:
        return _navigate(value[rest[0]], rest[1:])
    return ABSENT


def _is_predicate(name: str) -> bool:
    return canonical_predicate(name) in PREDICATE_CATEGORY


def _evaluate(expr: Expr, scope: _Scope):
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, Attr):
        return scope.resolve(expr.path)
    if isinstance(expr, Index):
        base = _evaluate(expr.base, scope)
        if isinstance(base, (list, tuple)) and 0 <= expr.index < len(base):
            return _navigate(base[expr.index], expr.path)
        return ABSENT
    if isinstance(expr, Call):
        args = [_evaluate(a, scope) for a in expr.args]
        return scope.call(expr.name, args)
    if isinstance(expr, Unary):
        if expr.op == "NOT":
            return not _truthy(_evaluate(expr.operand, scope))
        value = _evaluate(expr.operand, scope)
        return -value if _is_number(value) else ABSENT
    if isinstance(expr, Binary):
        return _binary(expr, scope)
    raise PipelineRuntimeError("cannot evaluate %r" % (expr,))


def _binary(expr: Binary, scope: _Scope):
    op = expr.op
    if op == "AND":
        return (_truthy(_evaluate(expr.left, scope))
                and _truthy(_evaluate(expr.right, scope)))
    if op == "OR":
        return (_truthy(_evaluate(expr.left, scope))
                or _truthy(_evaluate(expr.right, scope)))
    left = _evaluate(expr.left, scope)
    right = _evaluate(expr.right, scope)
    if op in ("==", "!=", "<", "<=", ">", ">="):
        return _compare(op, left, right)
    # arithmetic
    if not (_is_number(left) and _is_number(right)):
        return ABSENT
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if op == "/":
        if right == 0:
            raise PipelineRuntimeError("division by zero")
        return left / right
    raise PipelineRuntimeError("unknown operator %r" % op)


def _compare(op: str, left: object, right: object) -> bool:
    # the absent marker fails every comparison, including inequality
    if left is ABSENT or right is ABSENT:
        return False
    numbers = _is_number(left) and _is_number(right)
    same_kind = numbers or (
        isinstance(left, bool) and isinstance(right, bool)
    ) or (isinstance(left, str) and isinstance(right, str))
    if op == "==":
        return same_kind and left == right
    if op == "!=":
        return same_kind and left != right
    if not same_kind or isinstance(left, bool):
        return False
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    if op == ">":
        return left > right
    return left >= right


def _collect_predicates(expr: Expr, out: List[str]) -> None:
    if isinstance(expr, Attr):
        out.append(expr.path[0])
    elif isinstance(expr, Index):
        _collect_predicates(expr.base, out)
    elif isinstance(expr, Call):
        for arg in expr.args:
            _collect_predicates(arg, out)
    elif isinstance(expr, Unary):
        _collect_predicates(expr.operand, out)
    elif isinstance(expr, Binary):
        _collect_predicates(expr.left, out)
        _collect_predicates(expr.right, out)


# ---------------------------------------------------------------------------
# evaluator

class _Evaluator:
    def __init__(self, fb: FactBase, settings: AdjustmentSettings,
                 taxonomy: Optional[Taxonomy], observer_id: Optional[str]):
        self.fb = fb
        self.settings = settings
        self.taxonomy = taxonomy or Taxonomy()
        self.observer_id = observer_id
        self.logs: List[LogEntry] = []
        self.step = 0  # 1-based index of the operation being evaluated

    # -- helpers -----------------------------------------------------------

    def _deduce_for(self, predicates: Sequence[str]) -> None:
        try:
            categories = categories_for_predicates(predicates)
            ensure_categories(self.fb, categories, self.settings,
                              self.observer_id)
        except ValueError as exc:
            raise PipelineRuntimeError(str(exc))

    def _rel_truth(self, expr: Expr, subject: str, obj: str) -> bool:
        return _truthy(_evaluate(expr, _RelationScope(self.fb, subject, obj)))

    # -- operations ---------------------------------------------------------

    def op_adjust(self, op: AdjustOp, current):
        settings = self.settings
        try:
            # evolve() validates each step, so bad values surface here
            for directive in op.directives:
                settings = self._apply_directive(settings, directive)
            settings.validate()
        except ValueError as exc:
            raise PipelineRuntimeError(str(exc))
        self.settings = settings
        # thresholds changed: every stored relation is stale
        self.fb.clear_relations()
        return current

    def _apply_directive(self, settings: AdjustmentSettings, directive):
        words = tuple(w.lower() for w in directive.words)
        values = directive.values

        def one_number() -> float:
            if len(values) != 1 or not _is_number(values[0]):
                raise PipelineRuntimeError(
                    "directive %r expects exactly one number" % " ".join(words)
                )
            return float(values[0])

        if words == ("max", "gap"):
            return settings.evolve(max_gap=one_number())
        if words == ("max", "angle"):
            return settings.evolve(max_angle=one_number())
        if words == ("long", "ratio"):
            return settings.evolve(long_ratio=one_number())
        if words == ("thin", "ratio"):
            return settings.evolve(thin_ratio=one_number())
        if len(words) == 2 and words[0] == "sector":
            if words[1] not in SECTOR_SCHEMAS:
                raise PipelineRuntimeError(
                    "unknown sector schema %r (expected one of %s)"
                    % (words[1], ", ".join(SECTOR_SCHEMAS))
                )
            changes = {"sector_schema": words[1]}
            if values:
                changes["sector_factor"] = one_number()
            return settings.evolve(**changes)
        if len(words) == 2 and words[0] == "nearby":
            if words[1] not in NEARBY_SCHEMAS:
                raise PipelineRuntimeError(
                    "unknown nearby schema %r (expected one of %s)"
                    % (words[1], ", ".join(NEARBY_SCHEMAS))
                )
            changes = {"nearby_schema": words[1]}
            if values:
                changes["nearby_factor"] = one_number()
            return settings.evolve(**changes)
        if words == ("north",):
            if len(values) != 2:
                raise PipelineRuntimeError("north expects two numbers: x z")
            norm = math.hypot(values[0], values[1])
            if norm == 0:
                raise PipelineRuntimeError("north direction must be non-zero")
            return settings.evolve(
                north_direction=(values[0] / norm, values[1] / norm)
            )
        raise PipelineRuntimeError(
            "unknown adjust directive %r" % " ".join(words)
        )

    def op_deduce(self, op: DeduceOp, current):
        try:
            deduce(self.fb, op.categories, self.settings, self.observer_id)
        except ValueError as exc:
            raise PipelineRuntimeError(str(exc))
        return current

    def op_filter(self, op: FilterOp, current):
        kept = []
        for obj in current:
            scope = _ObjectScope(obj, self.fb, self.settings,
                                 forbid_predicates=True)
            if _truthy(_evaluate(op.expr, scope)):
                kept.append(obj)
        return kept

    def op_isa(self, op: IsaOp, current):
        names = [term.name for term in op.classes]
        kept = []
        for obj in current:
            if (self.taxonomy.isa_any(obj.type, names)
                    or self.taxonomy.isa_any(obj.label, names)):
                kept.append(obj)
        return kept

    def op_pick(self, op: PickOp, current):
        predicates: List[str] = []
        _collect_predicates(op.expr, predicates)
        self._deduce_for(predicates)
        member_ids = [obj.id for obj in current]
        excluded = set(member_ids)
        picked = []
        for candidate in self.fb.object_list():
            if candidate.id in excluded:
                continue
            if any(self._rel_truth(op.expr, candidate.id, mid)
                   for mid in member_ids):
                picked.append(candidate)
        return picked

    def op_select(self, op: SelectOp, current):
        predicates: List[str] = []
        _collect_predicates(op.relation_expr, predicates)
        self._deduce_for(predicates)
        kept = []
        for obj in current:
            for other in self.fb.object_list():
                if other.id == obj.id:
                    continue
                if not self._rel_truth(op.relation_expr, obj.id, other.id):
                    continue
                if op.attribute_expr is not None:
                    scope = _ObjectScope(other, self.fb, self.settings)
                    if not _truthy(_evaluate(op.attribute_expr, scope)):
                        continue
                kept.append(obj)
                break
        return kept

    def op_sort(self, op: SortOp, current, chain):
        reverse = op.order == ">"
        head = op.key[0]
        if _is_predicate(head):
            keys = self._relation_sort_keys(op, current, chain)
        else:
            keys = []
            for obj in current:
                value = _ObjectScope(obj, self.fb, self.settings).resolve(op.key)
                keys.append(value if _is_number(value) else None)
        present = [(k, o) for k, o in zip(keys, current) if k is not None]
        missing = [o for k, o in zip(keys, current) if k is None]
        present.sort(key=lambda pair: pair[0], reverse=reverse)
        return [o for _, o in present] + missing

    def _relation_sort_keys(self, op: SortOp, current, chain):
        predicate = canonical_predicate(op.key[0])
        metric = op.key[1] if len(op.key) > 1 else "delta"
        if metric not in _RELATION_METRICS:
            raise PipelineRuntimeError(
                "unknown sort metric %r (expected one of %s)"
                % (metric, ", ".join(_RELATION_METRICS))
            )
        self._deduce_for([predicate])
        steps = abs(op.steps) if op.steps is not None else 1
        references = chain[max(0, len(chain) - 1 - steps)]
        keys = []
        for obj in current:
            best = None
            for ref in references:
                if ref.id == obj.id:
                    continue
                relation = self.fb.relation(obj.id, predicate, ref.id)
                if relation is None:
                    continue
                value = getattr(relation, metric)
                if best is None or value < best:
                    best = value
            keys.append(best)
        return keys

    def op_slice(self, op: SliceOp, current):
        count = len(current)
        if op.stop is not None:
            start = max(1, op.start)
            stop = min(count, op.stop)
            return list(current[start - 1 : stop])
        index = op.start
        if index < 0:
            index = count + index + 1
        if 1 <= index <= count:
            return [current[index - 1]]
        return []

    def op_calc(self, op: CalcOp, current):
        scope = _CalcScope(current, self.fb, self.settings)
        for assignment in op.assignments:
            if len(assignment.target) != 1:
                raise PipelineRuntimeError(
                    "calc assigns plain variable names, got %r"
                    % ".".join(assignment.target)
                )
            value = _evaluate(assignment.expr, scope)
            if value is ABSENT:
                raise PipelineRuntimeError(
                    "calc expression for %r has no value" % assignment.target[0]
                )
            self.fb.variables[assignment.target[0]] = value
        return current

    def op_map(self, op: MapOp, current):
        updated = []
        for obj in current:
            scope = _ObjectScope(obj, self.fb, self.settings)
            changed = obj
            for assignment in op.assignments:
                value = _evaluate(assignment.expr, scope)
                changed = self._assign(changed, assignment.target, value)
            try:
                self.fb.upsert(changed)
            except ValueError as exc:
                raise PipelineRuntimeError(str(exc))
            updated.append(changed)
        return updated

    def _assign(self, obj: SpatialObject, target: Tuple[str, ...], value):
        head = _ATTRIBUTE_ALIASES.get(target[0], target[0])
        if head == "id":
            raise PipelineRuntimeError(
                "objects cannot be renamed with map(); produce(copy) makes a "
                "fresh object instead"
            )
        if head == "custom" and len(target) == 2:
            custom = dict(obj.custom)
            custom[target[1]] = value
            return obj.evolve(custom=custom)
        if head == "confidence":
            if len(target) > 2:
                raise PipelineRuntimeError(
                    "unknown assignment target %r" % ".".join(target)
                )
            if not _is_number(value):
                raise PipelineRuntimeError("confidence values must be numbers")
            confidence = dict(obj.confidence)
            # bare confidence names the overall classification score
            key = target[1] if len(target) == 2 else "overall"
            confidence[key] = float(value)
            return obj.evolve(confidence=confidence)
        if len(target) != 1:
            raise PipelineRuntimeError(
                "unknown assignment target %r" % ".".join(target)
            )
        if head in _NUMERIC_FIELDS:
            if not _is_number(value):
                raise PipelineRuntimeError(
                    "%r expects a number, got %r" % (head, value)
                )
            return obj.evolve(**{head: float(value)})
        if head in _FLAG_FIELDS:
            return obj.evolve(**{head: _truthy(value)})
        if head in _TEXT_FIELDS:
            if not isinstance(value, str):
                raise PipelineRuntimeError(
                    "%r expects a string, got %r" % (head, value)
                )
            return obj.evolve(**{head: value})
        custom = dict(obj.custom)
        custom[head] = value
        return obj.evolve(custom=custom)

    def op_produce(self, op: ProduceOp, current):
        kind = op.kind
        if kind == "copy":
            produced = self._produce_copies(op, current)
        elif kind == "group":
            produced = self._produce_group(op, current)
        elif kind in _PRODUCE_PAIR_KINDS:
            produced = self._produce_zones(op, current)
        elif kind in SECTOR_CODES:
            produced = self._produce_sectors(op, current)
        else:
            raise PipelineRuntimeError(
                "unknown production kind %r" % kind
            )
        for obj in produced:
            if obj.id in self.fb:
                raise PipelineRuntimeError(
                    "produced id %r already exists" % obj.id
                )
            try:
                self.fb.upsert(obj)
            except ValueError as exc:
                raise PipelineRuntimeError(str(exc))
        return produced

    def _fresh_id(self, prefix: str, taken: set) -> str:
        n = 1
        while True:
            candidate = "%s-%d" % (prefix, n)
            if candidate not in self.fb and candidate not in taken:
                taken.add(candidate)
                return candidate
            n += 1

    def _finish(self, obj: SpatialObject, assignments) -> SpatialObject:
        scope = _ObjectScope(obj, self.fb, self.settings)
        for assignment in assignments:
            value = _evaluate(assignment.expr, scope)
            if assignment.target == ("id",):
                if not isinstance(value, str) or not value:
                    raise PipelineRuntimeError(
                        "produced id must be a non-empty string"
                    )
                obj = obj.evolve(id=value)
            else:
                obj = self._assign(obj, assignment.target, value)
            scope = _ObjectScope(obj, self.fb, self.settings)
        return obj

    def _produce_copies(self, op: ProduceOp, current):
        produced = []
        for obj in current:
            copy = obj.evolve(id=obj.id + ":copy", virtual=True)
            produced.append(self._finish(copy, op.assignments))
        return produced

    def _produce_group(self, op: ProduceOp, current):
        if not current:
            raise PipelineRuntimeError("produce(group) needs at least one object")
        x, y, z, w, h, d = enclosing_box(current)
        taken: set = set()
        group = SpatialObject(
            id=self._fresh_id("group", taken), x=x, y=y, z=z, w=w, h=h, d=d,
            angle=0.0, label="group", type="group", virtual=True,
        )
        return [self._finish(group, op.assignments)]

    def _produce_zones(self, op: ProduceOp, current):
        kind = op.kind
        self._deduce_for([kind])
        pairs = []
        if kind in _SYMMETRIC_ZONES:
            for i, a in enumerate(current):
                for b in current[i + 1 :]:
                    if self.fb.has_relation(a.id, kind, b.id):
                        pairs.append((a, b))
        else:
            for a in current:
                for b in current:
                    if a.id != b.id and self.fb.has_relation(a.id, kind, b.id):
                        pairs.append((a, b))
        produced = []
        taken: set = set()
        for subject, obj in pairs:
            if kind == "in":
                # the zone an inside object occupies is its own box
                box = (subject.x, subject.y, subject.z,
                       subject.w, subject.h, subject.d, subject.angle)
            else:
                region = contact_region(subject, obj, self.settings)
                if region is None:
                    continue
                box = region + (0.0,)
            x, y, z, w, h, d, angle = box
            zone = SpatialObject(
                id=self._fresh_id(kind, taken), x=x, y=y, z=z, w=w, h=h, d=d,
                angle=angle, label=kind, type="region", virtual=True,
                custom={"of": "%s %s" % (subject.id, obj.id)},
            )
            produced.append(self._finish(zone, op.assignments))
        return produced

    def _produce_sectors(self, op: ProduceOp, current):
        produced = []
        taken: set = set()
        for obj in current:
            x, y, z, w, h, d, angle = sector_region(obj, op.kind, self.settings)
            zone = SpatialObject(
                id=self._fresh_id(op.kind, taken), x=x, y=y, z=z,
                w=w, h=h, d=d, angle=angle, label=op.kind, type="region",
                virtual=True, custom={"of": obj.id},
            )
            produced.append(self._finish(zone, op.assignments))
        return produced

    def op_log(self, op: LogOp, current):
        from . import export, serialize  # deferred: avoids a module cycle

        predicates: List[str] = []
        for arg in op.args:
            token = arg.lower()
            if token == "3d":
                text = export.export_scene(list(current))
                self.logs.append(LogEntry(self.step, "scene", text))
            elif token == "base":
                text = serialize.dumps_facts(self.fb, self.settings)
                self.logs.append(LogEntry(self.step, "facts", text))
            else:
                predicate = canonical_predicate(token)
                if predicate not in PREDICATE_CATEGORY:
                    raise PipelineRuntimeError(
                        "log argument %r is neither a kind (3D, base) nor a "
                        "predicate" % arg
                    )
                predicates.append(predicate)
        if predicates:
            ids = [obj.id for obj in current]
            relations = [
                rel for rel in self.fb.relations_list()
                if rel.subject in ids and rel.object in ids
            ]
            labels = {obj.id: obj.label for obj in current if obj.label}
            text = export.export_mermaid(relations, tuple(predicates), labels)
            self.logs.append(LogEntry(self.step, "mermaid", text))
        if not op.args:
            self.logs.append(LogEntry(self.step, "summary", self._summary(current)))
        return current

    def _summary(self, current) -> str:
        lines = ["objects: %d" % len(current)]
        for obj in current:
            lines.append(
                "  %s  label=%r type=%r at (%.3f, %.3f, %.3f)"
                % (obj.id, obj.label, obj.type, obj.x, obj.y, obj.z)
            )
        lines.append("relations: %d" % len(self.fb.relations_list()))
        if self.fb.variables:
            rendered = ", ".join(
                "%s=%r" % (k, v) for k, v in sorted(self.fb.variables.items())
            )
            lines.append("variables: " + rendered)
        return "\n".join(lines)


def evaluate_pipeline(
    pipeline: Pipeline,
    fb: FactBase,
    settings: Optional[AdjustmentSettings] = None,
    taxonomy: Optional[Taxonomy] = None,
    observer_id: Optional[str] = None,
) -> PipelineResult:
    """Run a parsed pipeline against a fact base (which it may mutate)."""
    evaluator = _Evaluator(
        fb, settings or AdjustmentSettings(), taxonomy, observer_id
    )
    chain: List[Tuple[SpatialObject, ...]] = [tuple(fb.object_list())]
    halted = False
    for index, op in enumerate(pipeline.operations):
        evaluator.step = index + 1
        current = chain[index]
        try:
            if isinstance(op, HaltOp):
                halted = True
                chain.append(current)
                break
            if isinstance(op, ReloadOp):
                result = tuple(fb.object_list())
            elif isinstance(op, BacktraceOp):
                result = chain[max(0, index - abs(op.steps))]
            elif isinstance(op, AdjustOp):
                result = evaluator.op_adjust(op, current)
            elif isinstance(op, DeduceOp):
                result = evaluator.op_deduce(op, current)
            elif isinstance(op, FilterOp):
                result = evaluator.op_filter(op, current)
            elif isinstance(op, IsaOp):
                result = evaluator.op_isa(op, current)
            elif isinstance(op, PickOp):
                result = evaluator.op_pick(op, current)
            elif isinstance(op, SelectOp):
                result = evaluator.op_select(op, current)
            elif isinstance(op, SortOp):
                result = evaluator.op_sort(op, current, chain)
            elif isinstance(op, SliceOp):
                result = evaluator.op_slice(op, current)
            elif isinstance(op, CalcOp):
                result = evaluator.op_calc(op, current)
            elif isinstance(op, MapOp):
                result = evaluator.op_map(op, current)
            elif isinstance(op, ProduceOp):
                result = evaluator.op_produce(op, current)
            elif isinstance(op, LogOp):
                result = evaluator.op_log(op, current)
            else:
                raise PipelineRuntimeError("unhandled operation %r" % (op,))
        except PipelineRuntimeError as exc:
            if exc.step is None:
                raise PipelineRuntimeError(
                    str(exc), index + 1, op.name
                ) from exc
            raise
        chain.append(tuple(result))
    return PipelineResult(
        objects=chain[-1],
        chain=tuple(chain),
        settings=evaluator.settings,
        halted=halted,
        logs=tuple(evaluator.logs),
    )


def run_pipeline(
    text: str,
    fb: FactBase,
    settings: Optional[AdjustmentSettings] = None,
    taxonomy: Optional[Taxonomy] = None,
    observer_id: Optional[str] = None,
) -> PipelineResult:
    """Parse and evaluate pipeline text in one call."""
    from .dsl import parse_pipeline

    return evaluate_pipeline(
        parse_pipeline(text), fb, settings, taxonomy, observer_id
    )
