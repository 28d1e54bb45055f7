"""Job service: on-disk store, worker pool, HTTP API."""

from .app import API_PREFIX, create_app
from .store import JOB_STATES, AnalysisJob, JobPage, JobStore, job_from_dict, job_to_dict
from .worker import DEFAULT_MAX_UPLOAD_BYTES, ServiceConfig, WorkerPool

__all__ = [
    "API_PREFIX",
    "DEFAULT_MAX_UPLOAD_BYTES",
    "JOB_STATES",
    "AnalysisJob",
    "JobPage",
    "JobStore",
    "ServiceConfig",
    "WorkerPool",
    "create_app",
    "job_from_dict",
    "job_to_dict",
]
