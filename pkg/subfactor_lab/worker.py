"""
Celery application for worker processes.

    celery -A subfactor_lab.worker worker --loglevel=info
"""
from subfactor_lab.tasks import make_celery, register_celery_tasks

celery = make_celery()

# Register Celery tasks
celery_tasks = register_celery_tasks(celery)
