"""Skill-selection statistics gathered during evaluation."""
from collections import Counter, namedtuple

import attr

UsageRow = namedtuple('UsageRow', ['row', 'source_task', 'count'])


@attr.s(eq=False)
class SkillUsageLog:
    """Selection counts per (lifelong stage, evaluated task).

    `subset_tasks` lists the task owning each codebook subset, in row order.
    """
    rows_per_task = attr.ib()
    subset_tasks = attr.ib(factory=list)
    entries = attr.ib(factory=list)

    def add(self, stage, task_id, counts):
        if not counts:
            return
        self.entries.append({
            'stage': int(stage),
            'task': int(task_id),
            'counts': {int(row): int(n) for row, n in sorted(counts.items())}
        })

    def source_task(self, row):
        return self.subset_tasks[row // self.rows_per_task]

    def to_dict(self):
        return {
            'rows_per_task': self.rows_per_task,
            'subset_tasks': list(self.subset_tasks),
            'entries': [
                {**e, 'counts': {str(row): n for row, n in e['counts'].items()}}
                for e in self.entries
            ]
        }

    @classmethod
    def from_dict(cls, d):
        entries = [
            {**e, 'counts': {int(row): n for row, n in e['counts'].items()}}
            for e in d['entries']
        ]
        return cls(d['rows_per_task'], list(d['subset_tasks']), entries)


def skill_usage(log, task_id=None, stage=None, top_n=10):
    """Most frequently selected codebook rows, with the task each row came from.

    Counts are aggregated over the log entries matching `task_id` and `stage`
    (None matches everything); ties are broken by the lower row id.
    """
    totals = Counter()
    for entry in log.entries:
        if task_id is not None and entry['task'] != task_id:
            continue
        if stage is not None and entry['stage'] != stage:
            continue
        totals.update(entry['counts'])
    ranked = sorted(totals.items(), key=lambda item: (-item[1], item[0]))
    return [UsageRow(row, log.source_task(row), count) for row, count in ranked[:top_n]]
