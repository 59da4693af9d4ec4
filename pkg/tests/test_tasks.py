import pytest

from subfactor_lab.catalog import load_entry
from subfactor_lab.config import TestingConfig
from subfactor_lab.models.report import PASSED
from subfactor_lab.tasks import make_celery, register_celery_tasks, run_distributed


@pytest.fixture(scope='module')
def celery_tasks():
    return register_celery_tasks(make_celery(TestingConfig))


def test_celery_app_is_eager(celery_tasks):
    assert celery_tasks['run_suite'].app.conf.task_always_eager
    assert celery_tasks['run_suite'].name == 'tasks.run_suite'


def test_run_suite_task(celery_tasks):
    spec_text = load_entry('C2').format()
    payload = celery_tasks['run_suite'].delay(spec_text, 'markov', 1, 0, 1e-8).get()
    assert payload['status'] == 'success'
    assert payload['result']['suite'] == 'markov'
    assert payload['result']['status'] == PASSED


def test_run_suite_task_reports_errors(celery_tasks):
    spec_text = load_entry('C2').format()
    payload = celery_tasks['run_suite'].delay(spec_text, 'no-such-suite', 1, 0, 1e-8).get()
    assert payload['status'] == 'error'
    assert 'no-such-suite' in payload['message']


def test_run_distributed(celery_tasks):
    report = run_distributed(
        celery_tasks, load_entry('C2'), ['structure', 'markov'], depth=2, seed=0, tol=1e-8)
    assert [result.suite for result in report.suites] == ['markov', 'structure']
    assert report.depth == 2
    assert report.passed


def test_run_distributed_collects_task_errors(celery_tasks):
    spec = load_entry('C3')
    spec.G = ((1, 0), (0, 1))
    report = run_distributed(celery_tasks, spec, ['markov'], depth=1, seed=0, tol=1e-8)
    assert report.suites[0].error == 'not connected'
    assert not report.passed
