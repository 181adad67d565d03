"""Curriculum guideline tree: knowledge areas, knowledge units, and categories.

The guideline file is a UTF-8 JSON tree::

    {"name": ..., "areas": [{"id", "title", "units": [
        {"id", "title", "items": [{"id", "kind": "topic"|"outcome", "text", "level"?}]}]}]}

Every knowledge-area and knowledge-unit title row also counts as a category
(kind ``heading``) so that whole-guideline totals include them, but headings
are never scored by any matcher.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum


class CategoryKind(str, Enum):
    TOPIC = "topic"
    OUTCOME = "outcome"
    HEADING = "heading"


class OutcomeLevel(str, Enum):
    FAMILIARITY = "familiarity"
    USAGE = "usage"
    ASSESSMENT = "assessment"


class GuidelineParseError(ValueError):
    """The input does not follow the guideline schema.

    ``path`` locates the offending node, e.g. ``areas[0].units[1].items[2]``.
    """

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{message} (at {path})" if path else message)


class DuplicateIdError(ValueError):
    """Two nodes in the tree share an identifier."""

    def __init__(self, duplicate_id: str):
        self.duplicate_id = duplicate_id
        super().__init__(f"duplicate identifier {duplicate_id!r} in guideline")


class UnknownIdError(KeyError):
    """Lookup of a category id that does not exist in the guideline."""


@dataclass(frozen=True)
class Category:
    id: str
    kind: CategoryKind
    text: str
    outcome_level: OutcomeLevel | None = None

    @property
    def rateable(self) -> bool:
        return self.kind is not CategoryKind.HEADING


@dataclass
class KnowledgeUnit:
    id: str
    title: str
    categories: list[Category]
    summary: str | None = None


@dataclass
class KnowledgeArea:
    id: str
    title: str
    units: list[KnowledgeUnit]


@dataclass
class Guideline:
    """Parsed guideline. Immutable after construction apart from unit summaries."""

    name: str
    areas: list[KnowledgeArea]
    _categories: list[Category] = field(init=False, repr=False, compare=False)
    _by_id: dict[str, Category] = field(init=False, repr=False, compare=False)
    _context: dict[str, tuple[str, str]] = field(init=False, repr=False, compare=False)
    _units_by_id: dict[str, KnowledgeUnit] = field(init=False, repr=False, compare=False)
    _area_ids: set[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self._categories = []
        self._by_id = {}
        self._context = {}
        self._units_by_id = {}
        self._area_ids = set()
        for area in self.areas:
            if not area.title:
                raise GuidelineParseError("knowledge area title must be non-empty")
            self._add(Category(id=area.id, kind=CategoryKind.HEADING, text=area.title))
            self._area_ids.add(area.id)
            for unit in area.units:
                self._add(Category(id=unit.id, kind=CategoryKind.HEADING, text=unit.title))
                self._context[unit.id] = (area.title, unit.title)
                self._units_by_id[unit.id] = unit
                for cat in unit.categories:
                    self._add(cat)
                    self._context[cat.id] = (area.title, unit.title)

    def _add(self, cat: Category) -> None:
        if cat.id in self._by_id:
            raise DuplicateIdError(cat.id)
        self._by_id[cat.id] = cat
        self._categories.append(cat)

    @property
    def categories(self) -> list[Category]:
        """All categories, headings included, in guideline traversal order."""
        return list(self._categories)

    @property
    def units(self) -> list[KnowledgeUnit]:
        return [u for a in self.areas for u in a.units]

    def category(self, category_id: str) -> Category:
        try:
            return self._by_id[category_id]
        except KeyError:
            raise UnknownIdError(category_id) from None

    def unit(self, unit_id: str) -> KnowledgeUnit:
        try:
            return self._units_by_id[unit_id]
        except KeyError:
            raise UnknownIdError(unit_id) from None


def parse_guideline(data: bytes | str) -> Guideline:
    """Parse a guideline JSON document into the tree.

    Raises :class:`GuidelineParseError` when the document is malformed and
    :class:`DuplicateIdError` when two nodes share an id.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise GuidelineParseError(f"not valid UTF-8: {exc}") from exc
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise GuidelineParseError(f"invalid JSON: {exc}") from exc

    if not isinstance(raw, dict):
        raise GuidelineParseError("top-level value must be an object", "$")
    name = _expect_str(raw, "name", "$")
    areas_raw = _expect_list(raw, "areas", "$")

    areas = []
    for i, area_raw in enumerate(areas_raw):
        path = f"areas[{i}]"
        if not isinstance(area_raw, dict):
            raise GuidelineParseError("knowledge area must be an object", path)
        area_id = _expect_str(area_raw, "id", path)
        title = _expect_str(area_raw, "title", path)
        units = []
        for j, unit_raw in enumerate(_expect_list(area_raw, "units", path)):
            unit_path = f"{path}.units[{j}]"
            if not isinstance(unit_raw, dict):
                raise GuidelineParseError("knowledge unit must be an object", unit_path)
            units.append(
                KnowledgeUnit(
                    id=_expect_str(unit_raw, "id", unit_path),
                    title=_expect_str(unit_raw, "title", unit_path),
                    categories=[
                        _parse_item(item_raw, f"{unit_path}.items[{n}]")
                        for n, item_raw in enumerate(_expect_list(unit_raw, "items", unit_path))
                    ],
                )
            )
        areas.append(KnowledgeArea(id=area_id, title=title, units=units))
    return Guideline(name=name, areas=areas)


def load_guideline(path: str) -> Guideline:
    with open(path, "rb") as fh:
        return parse_guideline(fh.read())


def _parse_item(raw: object, path: str) -> Category:
    if not isinstance(raw, dict):
        raise GuidelineParseError("item must be an object", path)
    kind_raw = _expect_str(raw, "kind", path)
    if kind_raw not in (CategoryKind.TOPIC.value, CategoryKind.OUTCOME.value):
        raise GuidelineParseError(f"kind must be 'topic' or 'outcome', got {kind_raw!r}", path)
    kind = CategoryKind(kind_raw)
    level_raw = raw.get("level")
    if kind is CategoryKind.OUTCOME:
        if level_raw not in tuple(lv.value for lv in OutcomeLevel):
            raise GuidelineParseError(f"outcome requires a level, got {level_raw!r}", path)
        level = OutcomeLevel(level_raw)
    else:
        if level_raw is not None:
            raise GuidelineParseError("topics must not carry a level", path)
        level = None
    return Category(
        id=_expect_str(raw, "id", path),
        kind=kind,
        text=_expect_str(raw, "text", path),
        outcome_level=level,
    )


def _expect_str(obj: dict, key: str, path: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str) or not value:
        raise GuidelineParseError(f"{key!r} must be a non-empty string", f"{path}.{key}")
    return value


def _expect_list(obj: dict, key: str, path: str) -> list:
    value = obj.get(key)
    if not isinstance(value, list):
        raise GuidelineParseError(f"{key!r} must be a list", f"{path}.{key}")
    return value


def rateable_categories(guideline: Guideline) -> list[Category]:
    """All topic/outcome categories in traversal order.

    This order is the global tie-break order used when ranking.
    """
    return [c for c in guideline._categories if c.rateable]


def rank_order(guideline: Guideline) -> dict[str, int]:
    """Map category id -> position used to break score ties."""
    return {c.id: i for i, c in enumerate(rateable_categories(guideline))}


def context_of(guideline: Guideline, category_id: str) -> tuple[str, str]:
    """Enclosing (knowledge-area title, knowledge-unit title) of a category.

    A knowledge-unit heading is its own context. Knowledge-area ids have no
    enclosing unit and are rejected.
    """
    if category_id in guideline._area_ids:
        raise ValueError(f"{category_id!r} is a knowledge area; it has no enclosing unit")
    try:
        return guideline._context[category_id]
    except KeyError:
        raise UnknownIdError(category_id) from None


def guideline_to_dict(guideline: Guideline) -> dict:
    """Inverse of :func:`parse_guideline` (unit summaries are not part of the schema)."""
    return {
        "name": guideline.name,
        "areas": [
            {
                "id": area.id,
                "title": area.title,
                "units": [
                    {
                        "id": unit.id,
                        "title": unit.title,
                        "items": [
                            {
                                "id": cat.id,
                                "kind": cat.kind.value,
                                "text": cat.text,
                                **(
                                    {"level": cat.outcome_level.value}
                                    if cat.outcome_level is not None
                                    else {}
                                ),
                            }
                            for cat in unit.categories
                        ],
                    }
                    for unit in area.units
                ],
            }
            for area in guideline.areas
        ],
    }


def dump_guideline(guideline: Guideline) -> str:
    return json.dumps(guideline_to_dict(guideline), indent=2, sort_keys=True)


def apply_unit_summaries(guideline: Guideline, summaries: dict[str, str]) -> None:
    """Attach generated summaries to units. Build phase only, before concurrent use."""
    for unit_id, text in summaries.items():
        unit = guideline.unit(unit_id)
        if not text:
            raise ValueError(f"empty summary for unit {unit_id!r}")
        unit.summary = text
