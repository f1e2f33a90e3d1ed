"""Dictionary diffing and transient-view materialization.

The stored dictionary is authoritative; a view re-shapes an object's values
under another dictionary version of the same class without touching the
stored bytes. Field identity is by name: a rename is a drop plus an add.
"""

from __future__ import annotations

from dataclasses import dataclass

from pndb.errors import IncompatibleEvolution, NotFound
from pndb.model import (
    CollectionInstance,
    DataDictionary,
    FieldSpec,
    ParameterValue,
    PrimitiveType,
    Issue,
    default_value,
)


@dataclass(frozen=True)
class AddField:
    spec: FieldSpec
    fill: ParameterValue


@dataclass(frozen=True)
class DropField:
    name: str


@dataclass(frozen=True)
class WidenType:
    """Int field retyped to float; the only permitted retyping."""

    name: str


@dataclass(frozen=True)
class Reorder:
    """Permutation over the surviving fields: after drops, the entry landing
    at position j came from surviving position ``permutation[j]``."""

    permutation: tuple[int, ...]


@dataclass(frozen=True)
class EvolutionPlan:
    """Ordered actions transforming an old-version instance into a valid
    new-version instance. Empty means the dictionaries are value-identical."""

    class_name: str
    old_version: int
    new_version: int
    actions: tuple[object, ...]

    @property
    def empty(self) -> bool:
        return not self.actions


@dataclass
class ViewResult:
    instance: CollectionInstance
    notices: list[Issue]


def diff_dictionaries(old: DataDictionary, new: DataDictionary) -> EvolutionPlan:
    """Plan the transformation old -> new.

    Emits drops (old order), widenings, one reorder of the survivors if their
    relative order changed, then adds at their target indices. Any same-name
    type change other than int -> float is incompatible.
    """
    if old.class_name != new.class_name:
        raise ValueError(f"class mismatch: {old.class_name} vs {new.class_name}")
    old_names = old.field_names()
    new_names = new.field_names()
    new_by_name = {spec.name: spec for spec in new.fields}

    actions: list[object] = []
    survivors_old: list[str] = []
    for spec in old.fields:
        target = new_by_name.get(spec.name)
        if target is None:
            actions.append(DropField(spec.name))
            continue
        survivors_old.append(spec.name)
        if target.type is spec.type:
            continue
        if spec.type is PrimitiveType.INT and target.type is PrimitiveType.FLOAT:
            actions.append(WidenType(spec.name))
        else:
            raise IncompatibleEvolution(
                f"field {spec.name}: cannot evolve {spec.type.tag} "
                f"to {target.type.tag}")

    survivors_new = [name for name in new_names if name in set(old_names)]
    if survivors_old != survivors_new:
        pos = {name: i for i, name in enumerate(survivors_old)}
        actions.append(Reorder(tuple(pos[name] for name in survivors_new)))

    for spec in new.fields:
        if spec.name not in set(old_names):
            actions.append(AddField(spec, default_value(spec)))

    return EvolutionPlan(old.class_name, old.dict_version, new.dict_version,
                         tuple(actions))


def apply_plan(plan: EvolutionPlan, names: tuple[str, ...],
               values: tuple[ParameterValue, ...],
               notices: list[Issue]) -> tuple[tuple[str, ...], tuple[ParameterValue, ...]]:
    """Run the plan's actions over (name, value) pairs aligned with the old
    dictionary, appending fill/drop/widen notices."""
    entries = list(zip(names, values))
    for action in plan.actions:
        if isinstance(action, DropField):
            entries = [(n, v) for n, v in entries if n != action.name]
            notices.append(Issue("Dropped", action.name))
        elif isinstance(action, WidenType):
            entries = [
                (n, ParameterValue(PrimitiveType.FLOAT, float(v.payload))
                 if n == action.name else v)
                for n, v in entries]
            notices.append(Issue("Widened", action.name))
        elif isinstance(action, Reorder):
            entries = [entries[i] for i in action.permutation]
        elif isinstance(action, AddField):
            entries.insert(action.spec.index, (action.spec.name, action.fill))
            notices.append(Issue("Filled", action.spec.name))
        else:
            raise TypeError(f"unknown plan action {action!r}")
    return tuple(n for n, _ in entries), tuple(v for _, v in entries)


def materialize_view(store, ref, target_dict_version: int) -> ViewResult:
    """View the object named by *ref* under *target_dict_version*, composing
    per-step diffs along the linear version chain (forward or backward).

    The result always validates cleanly against the target dictionary.
    Backward steps across a widening fail: float cannot narrow to int.
    """
    versions = store.dictionary_versions(ref.class_name)
    if target_dict_version not in versions:
        raise NotFound(
            f"dictionary {ref.class_name} v{target_dict_version} does not exist")
    instance = store.get_object(ref.class_name, ref.instance_name,
                                ref.object_version)
    notices: list[Issue] = []
    current = instance.dict_version
    names = store.get_dictionary(ref.class_name, current).field_names()
    values = instance.values
    step = 1 if target_dict_version >= current else -1
    while current != target_dict_version:
        nxt = current + step
        plan = diff_dictionaries(store.get_dictionary(ref.class_name, current),
                                 store.get_dictionary(ref.class_name, nxt))
        names, values = apply_plan(plan, names, values, notices)
        current = nxt
    viewed = CollectionInstance(
        class_name=instance.class_name,
        instance_name=instance.instance_name,
        scope=instance.scope,
        dict_version=target_dict_version,
        object_version=instance.object_version,
        values=values,
        field_names=names,
    )
    return ViewResult(viewed, notices)
