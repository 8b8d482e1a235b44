import os
import app.models
from app.utils import helper, total


def run():
    # Build two records and add them up.
    items = [helper("a", 1), helper("b", 2)]
    assert all(isinstance(i, app.models.Record) for i in items)
    print(os.getcwd(), total(items))
