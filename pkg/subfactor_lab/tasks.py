import logging
from functools import lru_cache

from celery import Celery

from subfactor_lab.config import get_config
from subfactor_lab.models.report import SuiteResult, VerificationReport
from subfactor_lab.models.specfile import InclusionSpec
from subfactor_lab.suites import build_context, registry, run_suite

logger = logging.getLogger(__name__)


def make_celery(config=None):
    """Create a Celery instance from the package configuration"""
    config = get_config() if config is None else config
    celery = Celery(
        'subfactor_lab',
        broker=config.CELERY_BROKER_URL,
        backend=config.CELERY_RESULT_BACKEND
    )
    celery.conf.update(
        task_always_eager=config.CELERY_TASK_ALWAYS_EAGER,
        task_serializer='json',
        result_serializer='json',
        accept_content=['json'],
    )
    return celery


@lru_cache(maxsize=8)
def _context(spec_text, depth, seed, tol):
    # one tower per worker process and run settings
    return build_context(InclusionSpec.parse(spec_text), depth=depth, seed=seed, tol=tol)


def register_celery_tasks(celery):
    """Register all Celery tasks"""
    @celery.task(name='tasks.run_suite')
    def run_suite_task(spec_text, suite, depth, seed, tol):
        """Rebuild the tower for the spec and run one suite on it"""
        try:
            context = _context(spec_text, depth, seed, tol)
            result = run_suite(context, suite)
            return {'status': 'success', 'result': result.to_dict()}
        except Exception as e:
            logger.error(f"Error running suite {suite}: {e}")
            return {'status': 'error', 'message': str(e)}

    return {'run_suite': run_suite_task}


def run_distributed(celery_tasks, spec, names, depth, seed, tol, timeout=None):
    """
    Dispatch one task per suite and collect the entries into a report.

    Workers rebuild the tower from the spec text; nothing is built locally.
    """
    names = registry.resolve(names)
    spec_text = spec.format()
    pending = {
        name: celery_tasks['run_suite'].delay(spec_text, name, depth, seed, tol)
        for name in names
    }
    report = VerificationReport(spec.name, seed, depth, tol)
    for name, async_result in pending.items():
        payload = async_result.get(timeout=timeout)
        if payload.get('status') == 'success':
            report.suites.append(SuiteResult.from_dict(payload['result']))
        else:
            suite = registry.get(name)
            report.suites.append(SuiteResult(
                name, suite.statement, tol, error=payload.get('message', 'task failed')))
    logger.info(f"Collected {len(report.suites)} distributed suite results")
    return report
