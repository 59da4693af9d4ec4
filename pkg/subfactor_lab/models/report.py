"""
Verification reports: one SuiteResult per suite, collected into a VerificationReport.
"""
import csv
import io
import json
import math
from dataclasses import dataclass, field

from subfactor_lab.models.serializer import SerializerMixin, to_jsonable

PASSED = 'passed'
FAILED = 'failed'
ERROR = 'error'
SKIPPED = 'skipped'


@dataclass
class SuiteResult(SerializerMixin):
    """
    Outcome of one verification suite.

    Residuals are finite nonnegative numbers; a non-finite residual is moved
    out of ``residuals`` and recorded as an error instead.
    """
    suite: str
    statement: str
    tolerance: float
    residuals: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    wall_time: float = 0.0
    error: str = None
    skipped: str = None

    def __post_init__(self):
        clean, broken = {}, []
        for name, value in self.residuals.items():
            value = float(abs(value))
            if math.isfinite(value):
                clean[name] = value
            else:
                broken.append(name)
        self.residuals = clean
        if broken and self.error is None:
            self.error = f"non-finite residual: {', '.join(broken)}"

    @property
    def status(self):
        if self.error is not None:
            return ERROR
        if self.skipped is not None:
            return SKIPPED
        return PASSED if self.passed else FAILED

    @property
    def passed(self):
        if self.error is not None:
            return False
        return all(value <= self.tolerance for value in self.residuals.values())

    @property
    def worst(self):
        """Name and value of the largest residual."""
        if not self.residuals:
            return None, 0.0
        name = max(self.residuals, key=self.residuals.get)
        return name, self.residuals[name]

    def to_dict(self, exclude=None, include=None):
        include = list(include or []) + ['status', 'passed']
        return super().to_dict(exclude=exclude, include=include)

    @classmethod
    def from_dict(cls, data):
        return super().from_dict({k: v for k, v in data.items() if k not in ('status', 'passed')})


@dataclass
class VerificationReport(SerializerMixin):
    spec_name: str
    seed: int
    depth: int
    tolerance: float
    suites: list = field(default_factory=list)

    @property
    def passed(self):
        return all(result.status in (PASSED, SKIPPED) for result in self.suites)

    @property
    def exit_code(self):
        return 0 if self.passed else 1

    def to_dict(self, exclude=None, include=None):
        include = list(include or []) + ['passed']
        return super().to_dict(exclude=exclude, include=include)

    @classmethod
    def from_dict(cls, data):
        suites = [SuiteResult.from_dict(entry) for entry in data.get('suites', [])]
        report = super().from_dict({k: v for k, v in data.items() if k != 'passed'})
        report.suites = suites
        return report

    def to_table(self):
        """Human-readable table, one row per suite."""
        header = f"{self.spec_name}  seed={self.seed}  depth={self.depth}  tol={self.tolerance:g}"
        rows = [('suite', 'status', 'worst residual', 'value', 'time [s]')]
        for result in self.suites:
            name, value = result.worst
            rows.append((
                result.suite,
                result.status,
                name or '-',
                f"{value:.3e}",
                f"{result.wall_time:.2f}",
            ))
        widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
        lines = [header, '']
        for row in rows:
            lines.append('  '.join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
        for result in self.suites:
            if result.error:
                lines.append(f"{result.suite}: {result.error}")
            elif result.skipped:
                lines.append(f"{result.suite}: skipped, {result.skipped}")
        lines.append('')
        lines.append('PASS' if self.passed else 'FAIL')
        return '\n'.join(lines)

    def to_csv(self):
        """One row per (suite, residual)."""
        output = io.StringIO()
        writer = csv.writer(output)

        writer.writerow(['Suite', 'Status', 'Residual', 'Value', 'Tolerance', 'Wall Time'])
        for result in self.suites:
            if not result.residuals:
                writer.writerow([result.suite, result.status, '', '', result.tolerance,
                                 f"{result.wall_time:.3f}"])
            for name, value in result.residuals.items():
                writer.writerow([result.suite, result.status, name, f"{value:.6e}",
                                 result.tolerance, f"{result.wall_time:.3f}"])

        csv_data = output.getvalue()
        output.close()
        return csv_data


def render(payload, fmt):
    """Render a report-like object as 'json', 'csv' or 'table'."""
    if fmt == 'json':
        data = payload.to_dict() if hasattr(payload, 'to_dict') else to_jsonable(payload)
        return json.dumps(data, indent=2, ensure_ascii=False)
    if fmt == 'csv':
        return payload.to_csv()
    return payload.to_table()
