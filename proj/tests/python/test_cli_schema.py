# Copyright 2026 The ergodic-align Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Runs the command-line tool and validates its JSON output against the schema."""

import json
import os
import pathlib
import subprocess

import jsonschema
import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]
CLI = os.environ.get("ERGODIC_ALIGN_CLI", str(ROOT / "build" / "ergodic-align"))
SCHEMAS = pathlib.Path(os.environ.get("ERGODIC_ALIGN_SCHEMAS", ROOT / "schemas"))

COMMANDS = [
    ["simulate", "--scheme", "japb", "--a", "1,3", "--n", "4", "--q", "3", "--q", "5", "--trials", "200"],
    ["simulate", "--scheme", "child", "--parent", "ngjv", "--parent-m", "1", "--n", "3", "--q", "5", "--trials", "50"],
    ["exact", "lemma3", "--q", "5", "--L", "3"],
    ["exact", "round", "--n", "3", "--a", "1,2", "--k", "1", "--q", "3"],
    ["exact", "span", "--k", "2", "--len", "3", "--q", "5"],
    ["optimize", "--n", "8", "-K", "4"],
    ["optimize", "--n", "5", "-K", "4"],
    ["table", "--n-min", "3", "--n-max", "6"],
    ["figure", "--n", "4", "--n", "6"],
    ["regimes", "--alpha", "1/3", "--n-min", "6", "--n-max", "12"],
    ["regimes", "--beta", "2", "--n-max", "10", "--family", "child"],
    ["fit", "--scheme", "tdma", "--n", "3", "--q", "3", "--q", "5", "--q", "7", "--trials", "10"],
]


@pytest.fixture(scope="module")
def validator():
    schema = json.loads((SCHEMAS / "report.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


@pytest.mark.parametrize("args", COMMANDS, ids=lambda a: "-".join(a[:2]))
def test_json_output_matches_schema(validator, args):
    result = subprocess.run([CLI, *args, "--format", "json"], capture_output=True, text=True, check=True)
    doc = json.loads(result.stdout)
    validator.validate(doc)
    assert doc["rows"], "every report has at least one row"


def test_schema_rejects_a_wrong_type(validator):
    result = subprocess.run([CLI, "table", "--n-max", "3", "--format", "json"],
                            capture_output=True, text=True, check=True)
    doc = json.loads(result.stdout)
    doc["rows"][0]["exponent"] = "two"
    with pytest.raises(jsonschema.ValidationError):
        validator.validate(doc)


def test_csv_and_json_agree():
    csv = subprocess.run([CLI, "table", "--n-max", "4"], capture_output=True, text=True, check=True)
    js = subprocess.run([CLI, "table", "--n-max", "4", "--format", "json"],
                        capture_output=True, text=True, check=True)
    header = csv.stdout.splitlines()[0].split(",")
    assert header == json.loads(js.stdout)["columns"]
    assert len(csv.stdout.splitlines()) - 1 == len(json.loads(js.stdout)["rows"])


def test_invalid_input_is_one_line_error():
    result = subprocess.run([CLI, "simulate", "--scheme", "jap", "--n", "3", "--q", "4"],
                            capture_output=True, text=True)
    assert result.returncode != 0
    assert result.stdout == ""
    assert len(result.stderr.strip().splitlines()) == 1
