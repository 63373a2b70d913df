"""From raw posts to daily per-leaning series and a chart.

A dozen hand-written posts stand in for a real export.  Each post is
labeled by the registrable domain of the link it shares (cnn.com,
foxnews.com, ...) looked up in a small bias table; posts whose domain is
not listed stay unlabeled and are dropped from the series.  Days with no
posts count as zero.  The chart is plain SVG, written next to the other
outputs in ./demo_output.
"""

import datetime as dt
from pathlib import Path

from leancast import (BiasTable, PostRecord, aggregate_daily, emit_plot,
                      summarize)

TABLE = BiasTable.from_pairs([
    ("cnn.com", "left"),
    ("nytimes.com", "left_leaning"),
    ("reuters.com", "center"),
    ("wsj.com", "right_leaning"),
    ("foxnews.com", "right"),
])


def post(pid, day, url, likes):
    return PostRecord(post_id=pid, platform="twitter", url_or_domain=url,
                      likes=likes,
                      timestamp=dt.datetime(2018, 1, day, 12, 0))


POSTS = [
    post("a1", 1, "https://www.cnn.com/politics/story-1", 12),
    post("a2", 1, "https://cnn.com/politics/story-2", 4),
    post("a3", 1, "http://foxnews.com/opinion/piece-1", 30),
    post("a4", 2, "https://www.reuters.com/world/wire-1", 2),
    post("a5", 2, "https://edition.cnn.com/story-3", 7),
    post("a6", 3, "https://wsj.com/markets/column-1", 9),
    post("a7", 3, "https://www.foxnews.com/politics/piece-2", 18),
    post("a8", 4, "https://nytimes.com/opinion/essay-1", 25),
    post("a9", 4, "https://myblog.example/post", 1),      # not in the table
    post("b1", 5, "https://cnn.com/story-4", 3),
    post("b2", 6, "https://foxnews.com/piece-3", 11),
    post("b3", 6, "https://reuters.com/wire-2", 6),
]

summary = summarize(POSTS, TABLE)
print(f"{summary.total_posts} posts, {summary.labeled_posts} labeled, "
      f"{summary.unlabeled_posts} dropped")
for leaning, count in summary.per_leaning_counts.items():
    if count:
        print(f"  {leaning:>14}: {count}")

window = (dt.date(2018, 1, 1), dt.date(2018, 1, 7))
series = aggregate_daily(POSTS, TABLE, "post_count", window)
print("\ndaily post counts (zero-filled over the whole window):")
for leaning in ("left", "right", "center"):
    values = series[leaning].values.astype(int).tolist()
    print(f"  {leaning:>14}: {values}")

out_dir = Path("demo_output")
out_dir.mkdir(exist_ok=True)
svg_path = out_dir / "ingest_pipeline.svg"
svg_path.write_text(emit_plot([series["left"], series["right"]],
                              title="posts per day"))
print(f"\nchart written to {svg_path}")
