import csv
import io
import json
import math
from fractions import Fraction

import numpy as np

from subfactor_lab.models.report import (
    ERROR, FAILED, PASSED, SKIPPED, SuiteResult, VerificationReport, render)
from subfactor_lab.models.serializer import to_jsonable


def _report(*results):
    return VerificationReport('C2', 0, 3, 1e-8, list(results))


def test_status():
    assert SuiteResult('a', 'ok', 1e-8, {'x': 1e-12}).status == PASSED
    assert SuiteResult('b', 'bad', 1e-8, {'x': 1e-3}).status == FAILED
    assert SuiteResult('c', 'raised', 1e-8, error='ValueError: boom').status == ERROR
    assert SuiteResult('d', 'shallow', 1e-8, skipped='needs depth 3').status == SKIPPED


def test_residuals_are_magnitudes():
    result = SuiteResult('a', 'ok', 1e-8, {'x': -1e-12, 'y': np.float64(2e-10)})
    assert result.residuals == {'x': 1e-12, 'y': 2e-10}
    assert result.worst == ('y', 2e-10)


def test_non_finite_residual_is_an_error():
    result = SuiteResult('a', 'ok', 1e-8, {'x': math.nan, 'y': 0.0})
    assert result.status == ERROR
    assert 'x' in result.error
    assert result.residuals == {'y': 0.0}
    assert not result.passed


def test_empty_suite_passes():
    result = SuiteResult('a', 'ok', 1e-8)
    assert result.passed
    assert result.worst == (None, 0.0)


def test_suite_result_round_trip():
    result = SuiteResult('a', 'ok', 1e-8, {'x': 1e-12}, {'n': 2}, wall_time=0.5)
    data = result.to_dict()
    assert data['status'] == PASSED
    assert data['passed'] is True
    assert SuiteResult.from_dict(data) == result


def test_report_passes_with_skipped_suites():
    report = _report(
        SuiteResult('a', 'ok', 1e-8, {'x': 0.0}),
        SuiteResult('b', 'shallow', 1e-8, skipped='needs depth 3'))
    assert report.passed
    assert report.exit_code == 0


def test_report_fails_on_error():
    report = _report(
        SuiteResult('a', 'ok', 1e-8, {'x': 0.0}),
        SuiteResult('b', 'raised', 1e-8, error='DepthError: too shallow'))
    assert not report.passed
    assert report.exit_code == 1


def test_report_json():
    report = _report(SuiteResult('a', 'ok', 1e-8, {'x': 1e-12}, {'exponent': Fraction(-1, 2)}))
    data = json.loads(render(report, 'json'))
    assert data['passed'] is True
    assert data['spec_name'] == 'C2'
    assert data['suites'][0]['details'] == {'exponent': '-1/2'}
    rebuilt = VerificationReport.from_dict(data)
    assert rebuilt.suites[0].residuals == {'x': 1e-12}
    assert rebuilt.passed


def test_report_table():
    report = _report(
        SuiteResult('markov', 'ok', 1e-8, {'modulus': 1e-15}),
        SuiteResult('pushdown', 'bad', 1e-8, {'pushdown': 0.5}),
        SuiteResult('shift-identity', 'shallow', 1e-8, skipped='needs depth 3'))
    table = render(report, 'table')
    lines = table.splitlines()
    assert lines[0].startswith('C2  seed=0  depth=3')
    assert any(line.startswith('pushdown') and FAILED in line for line in lines)
    assert 'shift-identity: skipped, needs depth 3' in lines
    assert lines[-1] == 'FAIL'


def test_report_csv():
    report = _report(
        SuiteResult('markov', 'ok', 1e-8, {'modulus': 1e-15, 'state_on_M': 0.0}),
        SuiteResult('broken', 'raised', 1e-8, error='boom'))
    rows = list(csv.reader(io.StringIO(render(report, 'csv'))))
    assert rows[0] == ['Suite', 'Status', 'Residual', 'Value', 'Tolerance', 'Wall Time']
    assert [row[2] for row in rows[1:3]] == ['modulus', 'state_on_M']
    assert rows[3][:3] == ['broken', ERROR, '']


def test_to_jsonable():
    assert to_jsonable(np.array([[1, 2]])) == [[1, 2]]
    assert to_jsonable(1 + 2j) == [1.0, 2.0]
    assert to_jsonable(np.complex128(3.0)) == 3.0
    assert to_jsonable({1: np.int64(4), 'b': (np.float64(0.5), np.bool_(True))}) == {
        '1': 4, 'b': [0.5, True]}
    assert to_jsonable(Fraction(3, 4)) == '3/4'


def test_render_plain_dict_json():
    assert json.loads(render({'tau': np.float64(0.5)}, 'json')) == {'tau': 0.5}


def test_to_json():
    result = SuiteResult('a', 'ok', 1e-8, {'x': 0.0})
    data = json.loads(result.to_json(include=['status']))
    assert data['suite'] == 'a'
    assert data['status'] == PASSED
