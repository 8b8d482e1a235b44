"""Plain data records."""
from dataclasses import dataclass


@dataclass
class Record:
    # Primary key of the record.
    key: str
    value: int = 0
