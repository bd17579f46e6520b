"""Readers and writers for scenario, annotation and sample files."""
from __future__ import annotations
import json
from dataclasses import dataclass
from typing import Iterable, Iterator
import pandas as pd
from ..abstract import Serializable
from ..common import ValueDimension, Vote
from ..errors import DataFormatError, RejectedInputError
from ..samples import Annotation, AnnotatedSample, Scenario
from ..util import PathLike, atomic_write_text


def read_records(filename: PathLike) -> Iterator[tuple[int, dict]]:
    """Yield (line number, record) from a JSON-lines file, skipping blank lines."""
    with open(filename, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as err:
                raise DataFormatError(filename, lineno, None, f"invalid JSON: {err.msg}") from err
            if not isinstance(record, dict):
                raise DataFormatError(filename, lineno, None, "record is not an object")
            yield lineno, record


def _field(filename, lineno, record: dict, name: str):
    try:
        return record[name]
    except KeyError:
        raise DataFormatError(filename, lineno, name, "missing field") from None


def _int_field(filename, lineno, name: str, value) -> int:
    try:
        return int(value)
    except (TypeError, ValueError) as err:
        raise DataFormatError(filename, lineno, name, f"not an integer: {value!r}") from err


def _write_records(filename: PathLike, records: Iterable[dict]):
    lines = [json.dumps(r, sort_keys=True, ensure_ascii=False) for r in records]
    atomic_write_text(filename, "".join(line + "\n" for line in lines))


def read_scenarios(filename: PathLike) -> list[Scenario]:
    """Read one scenario per line. Blank lines are skipped; ids are "s<line number>"."""
    scenarios = []
    with open(filename, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            text = line.strip()
            if text:
                scenarios.append(Scenario(f"s{lineno}", text))
    return scenarios


def read_annotations(filename: PathLike) -> list[Annotation]:
    """Read raw votes: scenario_id, scenario_text, dimension_code, worker_id, vote per line."""
    annotations = []
    for lineno, record in read_records(filename):
        values = {
            name: _field(filename, lineno, record, name)
            for name in ("scenario_id", "scenario_text", "dimension_code", "worker_id", "vote")
        }
        try:
            dimension = ValueDimension.from_code(values["dimension_code"])
            vote = Vote.parse(values["vote"])
        except RejectedInputError as err:
            raise DataFormatError(filename, lineno, err.field, str(err)) from err
        annotations.append(
            Annotation(
                str(values["scenario_id"]), dimension, str(values["worker_id"]), vote, str(values["scenario_text"])
            )
        )
    return annotations


def write_annotations(filename: PathLike, annotations: Iterable[Annotation]):
    _write_records(
        filename,
        (
            {
                "scenario_id": a.scenario_id,
                "scenario_text": a.scenario_text,
                "dimension_code": a.dimension.code,
                "worker_id": a.worker_id,
                "vote": a.vote.value,
            }
            for a in annotations
        ),
    )


def sample_record(sample: AnnotatedSample) -> dict:
    return {
        "id": sample.id,
        "scenario": sample.scenario.text,
        "dimension_code": sample.dimension.code,
        "label": sample.label,
        "agreement": sample.agreement,
    }


def read_samples(filename: PathLike) -> list[AnnotatedSample]:
    """Read the canonical sample format: id, scenario, dimension_code, label, agreement per line."""
    samples = []
    for lineno, record in read_records(filename):
        names = ("id", "scenario", "dimension_code", "label")
        values = {name: _field(filename, lineno, record, name) for name in names}
        label = _int_field(filename, lineno, "label", values["label"])
        agreement = _int_field(filename, lineno, "agreement", record.get("agreement", 0))
        try:
            samples.append(
                AnnotatedSample(
                    Scenario(str(values["id"]), str(values["scenario"])),
                    ValueDimension.from_code(values["dimension_code"]),
                    label,
                    agreement,
                )
            )
        except RejectedInputError as err:
            raise DataFormatError(filename, lineno, err.field, str(err)) from err
    return samples


def write_samples(filename: PathLike, samples: Iterable[AnnotatedSample]):
    _write_records(filename, (sample_record(s) for s in samples))


@dataclass
class ColumnMapping(Serializable):
    """Column names of a comma-separated sample file.

    Args:
        scenario (str): Column holding the scenario text.
        dimension (str): Column holding the value dimension (code or name).
        label (str): Column holding the utility label (-1, 0, 1; floats are rounded).
        id (str): Column holding the sample id. Row numbers are used when empty.
        agreement (str): Column holding the agreement count. Optional.
    """

    scenario: str = "scenario"
    dimension: str = "value"
    label: str = "label"
    id: str = ""
    agreement: str = ""


def read_samples_csv(filename: PathLike, mapping: ColumnMapping = None) -> list[AnnotatedSample]:
    """Read a published comma-separated sample file using a column mapping."""
    mapping = mapping or ColumnMapping()
    frame = pd.read_csv(filename, dtype=str, keep_default_na=False)
    for column in (mapping.scenario, mapping.dimension, mapping.label, mapping.id, mapping.agreement):
        if column and column not in frame.columns:
            raise DataFormatError(filename, 1, column, "column not found in header")
    samples = []
    for row_number, row in enumerate(frame.to_dict(orient="records"), start=2):
        sample_id = row[mapping.id] if mapping.id else f"row{row_number - 1}"
        try:
            label = int(round(float(row[mapping.label])))
        except ValueError as err:
            raise DataFormatError(filename, row_number, mapping.label, str(err)) from err
        try:
            agreement = int(float(row[mapping.agreement])) if mapping.agreement else 0
        except ValueError as err:
            raise DataFormatError(filename, row_number, mapping.agreement, str(err)) from err
        try:
            samples.append(
                AnnotatedSample(
                    Scenario(str(sample_id), row[mapping.scenario]),
                    ValueDimension.from_code(row[mapping.dimension]),
                    label,
                    agreement,
                )
            )
        except RejectedInputError as err:
            raise DataFormatError(filename, row_number, err.field, str(err)) from err
    return samples
