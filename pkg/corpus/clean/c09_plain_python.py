from dataclasses import dataclass


@dataclass
class Row:
    key: str
    value: int


def totals(rows):
    acc = {}
    for row in rows:
        acc[row.key] = acc.get(row.key, 0) + row.value
    return acc
