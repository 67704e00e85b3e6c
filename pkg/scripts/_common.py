"""Small helpers shared by the experiment scripts."""

import sys
from pathlib import Path

from ggmrecon import io as gio


def write_csv(path, header, rows):
    out = gio.Output(None if path in (None, "-") else Path(path))
    with out as fh:
        gio.write_table(fh, header, rows)
    if path not in (None, "-"):
        print(f"wrote {path}", file=sys.stderr)
