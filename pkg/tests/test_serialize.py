import json
import random

import pytest
from conftest import CORRECT, random_inventory, random_property

from svamine.grammar import enumerate_templates
from svamine.serialize import (SerializeError, dump_properties, from_json,
                               load_properties_json, to_json)
from svamine.sva_parser import parse_sva


def test_handshake_rule_json(inv):
    doc = to_json(parse_sva(CORRECT, inv))
    assert doc["op"] == "implies"
    assert doc["cons"] == {"op": "delay", "cycles": 1,
                           "arg": {"op": "stable", "arg": {"op": "sig", "name": "DATA"}}}
    assert doc["ante"]["args"][1] == {"op": "eq", "lhs": {"op": "sig", "name": "READY"},
                                      "rhs": {"op": "level", "high": False}}


def test_round_trip_ground_and_templates(grammar):
    rng = random.Random(8)
    props = [random_property(rng, random_inventory(rng)) for _ in range(200)]
    props += enumerate_templates(grammar)
    for p in props:
        assert from_json(json.loads(json.dumps(to_json(p)))) == p
    text = dump_properties(props, [{"id": i} for i in range(len(props))])
    back, extras = load_properties_json(text)
    assert back == props
    assert extras[3] == {"id": 3}
    assert dump_properties(back, extras) == text


@pytest.mark.parametrize("doc, match", [
    ("not json", "invalid JSON"),
    ('{"format": "other"}', "not a property file"),
    ('{"format": "svamine-properties", "properties": [{"ast": {"op": "wat"}}]}', "unknown op"),
    ('{"format": "svamine-properties", "properties": [{"ast": {"op": "eq"}}]}', "malformed"),
    ('{"format": "svamine-properties", "properties": [{"ast": {"op": "delay", "cycles": 0, '
     '"arg": {"op": "rose", "arg": {"op": "sig", "name": "A"}}}}]}', "property 0"),
])
def test_load_errors(doc, match):
    with pytest.raises(SerializeError, match=match):
        load_properties_json(doc)
