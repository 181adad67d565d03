import json

import pytest

from curralign.ontology import Guideline, parse_guideline


def small_guideline_dict() -> dict:
    return {
        "name": "Mini CS Guideline",
        "areas": [
            {
                "id": "AL",
                "title": "Algorithms",
                "units": [
                    {
                        "id": "AL/Sorting",
                        "title": "Sorting",
                        "items": [
                            {
                                "id": "AL/Sorting/quicksort",
                                "kind": "topic",
                                "text": "Quicksort and heapsort",
                            },
                            {
                                "id": "AL/Sorting/dp",
                                "kind": "outcome",
                                "text": "Implement efficient dynamic programming solutions",
                                "level": "usage",
                            },
                        ],
                    },
                    {
                        "id": "AL/Graphs",
                        "title": "Graphs",
                        "items": [
                            {
                                "id": "AL/Graphs/graph",
                                "kind": "topic",
                                "text": "Graph algorithms",
                            },
                            {
                                "id": "AL/Graphs/bfs",
                                "kind": "topic",
                                "text": "Breadth-first-search traversal",
                            },
                        ],
                    },
                ],
            },
            {
                "id": "DS",
                "title": "Data Structures",
                "units": [
                    {
                        "id": "DS/Lists",
                        "title": "Lists",
                        "items": [
                            {
                                "id": "DS/Lists/linked",
                                "kind": "topic",
                                "text": "Linked list operations",
                            },
                            {
                                "id": "DS/Lists/functions",
                                "kind": "outcome",
                                "text": "Use functions over linked list structures",
                                "level": "familiarity",
                            },
                        ],
                    }
                ],
            },
        ],
    }


@pytest.fixture
def small_guideline() -> Guideline:
    return parse_guideline(json.dumps(small_guideline_dict()))


def make_guideline(areas: int, units_per_area: int, items_per_unit: int) -> Guideline:
    """Synthetic tree with one unique two-word phrase per category."""
    noun_pool = [f"topicword{n}" for n in range(10_000)]
    next_word = iter(noun_pool)
    tree = {"name": "synthetic", "areas": []}
    for a in range(areas):
        area = {"id": f"A{a}", "title": f"Area {a}", "units": []}
        for u in range(units_per_area):
            unit = {"id": f"A{a}/U{u}", "title": f"Unit {a}.{u}", "items": []}
            for i in range(items_per_unit):
                word = next(next_word)
                unit["items"].append(
                    {
                        "id": f"A{a}/U{u}/C{i}",
                        "kind": "topic",
                        "text": f"{word} structure",
                    }
                )
            area["units"].append(unit)
        tree["areas"].append(area)
    return parse_guideline(json.dumps(tree))


def guideline_with_totals(areas: int, units: int, items: int) -> Guideline:
    """Synthetic tree with exact area/unit/item counts, items spread evenly."""
    tree = {"name": "scale", "areas": []}
    units_per_area = units // areas
    base, extra = divmod(items, units)
    n = 0
    for a in range(areas):
        area = {"id": f"A{a}", "title": f"Area {a}", "units": []}
        for u in range(units_per_area):
            unit_index = a * units_per_area + u
            count = base + (1 if unit_index < extra else 0)
            unit = {"id": f"A{a}/U{u}", "title": f"Unit {a}.{u}", "items": []}
            for _ in range(count):
                unit["items"].append(
                    {"id": f"c{n}", "kind": "topic", "text": f"item{n:05d} material"}
                )
                n += 1
            area["units"].append(unit)
        tree["areas"].append(area)
    return parse_guideline(json.dumps(tree))
