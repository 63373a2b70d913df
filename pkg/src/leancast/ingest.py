"""Post ingestion: parse raw posts and a media-bias table, label each post
with a political leaning by its news domain, and aggregate daily series.

A post is labeled by the registrable domain of the URL it shares; posts
whose domain is not in the bias table stay unlabeled and are excluded from
the series (the summary reports how many).  Count and likes series are
zero-filled on empty days; mean-sentiment series carry NaN on days with no
posts, since a mean over nothing is undefined rather than zero.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import math
import re
from dataclasses import dataclass, field
from urllib.parse import urlsplit

import numpy as np

from .series import DailySeries

LEANINGS = ("left", "left_leaning", "center", "right_leaning", "right")
PLATFORMS = ("twitter", "gab")

POSTS_HEADER = ["post_id", "timestamp", "platform", "url_or_domain", "likes", "sentiment"]
BIAS_HEADER = ["domain", "leaning"]
SERIES_HEADER = ["date"] + list(LEANINGS)

_HOST_RE = re.compile(r"^[a-z0-9]([a-z0-9-]*[a-z0-9])?(\.[a-z0-9]([a-z0-9-]*[a-z0-9])?)+$")

# two-label public suffixes under which the registrable domain is 3 labels
_MULTI_SUFFIXES = frozenset({
    "co.uk", "org.uk", "ac.uk", "gov.uk", "me.uk", "net.uk",
    "co.jp", "ne.jp", "or.jp", "com.au", "net.au", "org.au",
    "co.nz", "org.nz", "co.in", "net.in", "org.in", "co.za",
    "com.br", "com.mx", "com.ar", "com.sg", "com.hk", "com.tw",
    "com.cn", "com.tr",
})


@dataclass(frozen=True)
class PostRecord:
    post_id: str
    timestamp: dt.datetime
    platform: str
    url_or_domain: str
    likes: int
    sentiment: float | None = None

    def __post_init__(self):
        if self.platform not in PLATFORMS:
            raise ValueError(f"unknown platform {self.platform!r}; expected one of {PLATFORMS}")
        if self.likes < 0:
            raise ValueError(f"post {self.post_id}: likes must be >= 0, got {self.likes}")
        if self.sentiment is not None and not -1.0 <= self.sentiment <= 1.0:
            raise ValueError(
                f"post {self.post_id}: sentiment {self.sentiment} outside [-1, 1]")

    @property
    def utc_date(self) -> dt.date:
        ts = self.timestamp
        if ts.tzinfo is not None:
            ts = ts.astimezone(dt.timezone.utc)
        return ts.date()


class DomainParseError(ValueError):
    pass


def extract_domain(url_or_domain: str) -> str:
    """Registrable domain of a URL or bare hostname, lowercased, www-less."""
    text = url_or_domain.strip()
    if not text:
        raise DomainParseError("cannot extract a domain from empty text")
    if "://" in text:
        host = urlsplit(text).hostname
        if not host:
            raise DomainParseError(f"cannot extract a domain from {url_or_domain!r}")
    else:
        host = text.split("/", 1)[0]
        if host.count(":") == 1:        # tolerate a port on a bare host
            host = host.split(":", 1)[0]
    host = host.lower().rstrip(".")
    if not _HOST_RE.match(host):
        raise DomainParseError(f"cannot extract a domain from {url_or_domain!r}")
    if host.startswith("www."):
        host = host[4:]
    labels = host.split(".")
    if len(labels) < 2:
        raise DomainParseError(f"cannot extract a domain from {url_or_domain!r}")
    take = 3 if len(labels) >= 3 and ".".join(labels[-2:]) in _MULTI_SUFFIXES else 2
    return ".".join(labels[-take:])


@dataclass
class BiasTable:
    entries: dict = field(default_factory=dict)   # registrable domain -> leaning

    def __post_init__(self):
        for domain, leaning in self.entries.items():
            if leaning not in LEANINGS:
                raise ValueError(f"unknown leaning {leaning!r} for domain {domain!r}")

    def __len__(self):
        return len(self.entries)

    @classmethod
    def from_pairs(cls, pairs) -> "BiasTable":
        entries = {}
        for raw_domain, leaning in pairs:
            domain = extract_domain(raw_domain)
            if domain in entries and entries[domain] != leaning:
                raise ValueError(
                    f"conflicting leanings for domain {domain!r}: "
                    f"{entries[domain]!r} vs {leaning!r}")
            entries[domain] = leaning
        return cls(entries)

    def leaning_for(self, url_or_domain: str) -> str | None:
        return self.entries.get(extract_domain(url_or_domain))


def label_post(post: PostRecord, table: BiasTable) -> str | None:
    """The bias table's leaning for the post's domain, or None if unknown."""
    if not table.entries:
        raise ValueError("bias table is empty")
    return table.leaning_for(post.url_or_domain)


@dataclass(frozen=True)
class IngestSummary:
    total_posts: int
    labeled_posts: int
    unlabeled_posts: int
    per_leaning_counts: dict
    date_range: tuple | None     # (first, last) calendar dates seen

    def __post_init__(self):
        if self.labeled_posts + self.unlabeled_posts != self.total_posts:
            raise ValueError("labeled + unlabeled must equal total")
        if sum(self.per_leaning_counts.values()) != self.labeled_posts:
            raise ValueError("per-leaning counts must sum to labeled_posts")

    def to_json(self) -> str:
        doc = {"total_posts": self.total_posts,
               "labeled_posts": self.labeled_posts,
               "unlabeled_posts": self.unlabeled_posts,
               "per_leaning_counts": dict(sorted(self.per_leaning_counts.items())),
               "date_range": [d.isoformat() for d in self.date_range]
               if self.date_range else None}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def summarize(posts, table: BiasTable) -> IngestSummary:
    per_leaning = {leaning: 0 for leaning in LEANINGS}
    labeled = 0
    dates = []
    for post in posts:
        dates.append(post.utc_date)
        leaning = label_post(post, table)
        if leaning is not None:
            labeled += 1
            per_leaning[leaning] += 1
    total = len(dates)
    return IngestSummary(
        total_posts=total, labeled_posts=labeled, unlabeled_posts=total - labeled,
        per_leaning_counts=per_leaning,
        date_range=(min(dates), max(dates)) if dates else None)


def _window_days(window) -> tuple:
    start, end = window
    if start > end:
        raise ValueError(f"empty date window: {start} > {end}")
    return start, end, (end - start).days + 1


def _posts_platform(posts) -> str:
    platforms = {p.platform for p in posts}
    if len(platforms) == 1:
        return platforms.pop()
    return "mixed" if platforms else "unknown"


def aggregate_daily(posts, table: BiasTable, metric: str, window) -> dict:
    """One zero-filled DailySeries per leaning over the window (inclusive).

    metric "post_count" adds 1 per labeled post, "likes_sum" adds the likes
    field; posts outside the window or without a label are dropped.
    """
    if metric not in ("post_count", "likes_sum"):
        raise ValueError(f"unknown aggregation metric {metric!r}")
    start, end, n_days = _window_days(window)
    totals = {leaning: np.zeros(n_days) for leaning in LEANINGS}
    for post in posts:
        leaning = label_post(post, table)
        if leaning is None:
            continue
        day = post.utc_date
        if day < start or day > end:
            continue
        totals[leaning][(day - start).days] += 1 if metric == "post_count" else post.likes
    platform = _posts_platform(posts)
    return {leaning: DailySeries(start_date=start, values=totals[leaning],
                                 platform=platform, leaning=leaning, metric=metric)
            for leaning in LEANINGS}


def daily_mean_sentiment(posts, table: BiasTable, window) -> dict:
    """Per-leaning daily mean of sentiment; NaN marks days with no posts."""
    start, end, n_days = _window_days(window)
    sums = {leaning: np.zeros(n_days) for leaning in LEANINGS}
    counts = {leaning: np.zeros(n_days) for leaning in LEANINGS}
    missing = []
    for post in posts:
        leaning = label_post(post, table)
        if leaning is None:
            continue
        day = post.utc_date
        if day < start or day > end:
            continue
        if post.sentiment is None:
            missing.append(post.post_id)
            continue
        idx = (day - start).days
        sums[leaning][idx] += post.sentiment
        counts[leaning][idx] += 1
    if missing:
        raise ValueError(f"posts missing sentiment: {', '.join(sorted(missing))}")
    platform = _posts_platform(posts)
    out = {}
    for leaning in LEANINGS:
        with np.errstate(invalid="ignore"):
            means = np.where(counts[leaning] > 0,
                             sums[leaning] / np.maximum(counts[leaning], 1), np.nan)
        out[leaning] = DailySeries(start_date=start, values=means, platform=platform,
                                   leaning=leaning, metric="sentiment_mean")
    return out


_TOKEN_RE = re.compile(r"[a-z0-9']+")


def score_sentiment_lexicon(text: str, lexicon: dict) -> float:
    """Mean lexicon value over matched lowercase tokens, clamped to [-1, 1];
    0.0 when nothing matches."""
    if not lexicon:
        raise ValueError("lexicon is empty")
    matched = [lexicon[token] for token in _TOKEN_RE.findall(text.lower())
               if token in lexicon]
    if not matched:
        return 0.0
    return float(min(1.0, max(-1.0, sum(matched) / len(matched))))


# -- CSV I/O ---------------------------------------------------------------


def _parse_timestamp(text: str, where: str) -> dt.datetime:
    cleaned = text.strip().replace("Z", "+00:00")
    try:
        return dt.datetime.fromisoformat(cleaned)
    except ValueError:
        raise ValueError(f"{where}: cannot parse timestamp {text!r}") from None


def read_posts_csv(source) -> list:
    """Parse the posts CSV (see POSTS_HEADER); raises with the row number
    on any malformed field."""
    close = False
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        handle = open(source, newline="")
        close = True
    else:
        handle = source
    try:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != POSTS_HEADER:
            raise ValueError(f"posts CSV header must be {','.join(POSTS_HEADER)}, "
                             f"got {header}")
        posts = []
        for line_no, cells in enumerate(reader, start=2):
            if not cells:
                continue
            where = f"posts row {line_no}"
            if len(cells) != len(POSTS_HEADER):
                raise ValueError(f"{where}: expected {len(POSTS_HEADER)} fields, "
                                 f"got {len(cells)}")
            post_id, ts, platform, url, likes, sentiment = [c.strip() for c in cells]
            try:
                likes_val = int(likes)
            except ValueError:
                raise ValueError(f"{where}: likes must be an integer, got {likes!r}") from None
            sent_val = float(sentiment) if sentiment else None
            try:
                posts.append(PostRecord(post_id=post_id,
                                        timestamp=_parse_timestamp(ts, where),
                                        platform=platform, url_or_domain=url,
                                        likes=likes_val, sentiment=sent_val))
            except ValueError as exc:
                raise ValueError(f"{where}: {exc}") from None
        return posts
    finally:
        if close:
            handle.close()


def read_bias_csv(source) -> BiasTable:
    close = False
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        handle = open(source, newline="")
        close = True
    else:
        handle = source
    try:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != BIAS_HEADER:
            raise ValueError(f"bias CSV header must be {','.join(BIAS_HEADER)}, got {header}")
        pairs = []
        for line_no, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != 2:
                raise ValueError(f"bias row {line_no}: expected 2 fields, got {len(cells)}")
            domain, leaning = cells[0].strip(), cells[1].strip()
            if leaning not in LEANINGS:
                raise ValueError(f"bias row {line_no}: unknown leaning {leaning!r}")
            pairs.append((domain, leaning))
        return BiasTable.from_pairs(pairs)
    finally:
        if close:
            handle.close()


def _format_value(v: float) -> str:
    if isinstance(v, float) and math.isnan(v):
        return ""
    if float(v) == int(v):
        return str(int(v))
    return repr(float(v))


def write_series_csv(series_by_leaning: dict, path) -> None:
    """Write the five-leaning daily series in column format."""
    missing = [l for l in LEANINGS if l not in series_by_leaning]
    if missing:
        raise ValueError(f"series missing leanings: {missing}")
    lengths = {len(series_by_leaning[l]) for l in LEANINGS}
    starts = {series_by_leaning[l].start_date for l in LEANINGS}
    if len(lengths) != 1 or len(starts) != 1:
        raise ValueError("all leaning series must share start date and length")
    base = series_by_leaning[LEANINGS[0]]
    with open(path, "w", newline="") as handle:
        handle.write(",".join(SERIES_HEADER) + "\n")
        for i, day in enumerate(base.dates()):
            cells = [day.isoformat()] + [
                _format_value(float(series_by_leaning[l].values[i])) for l in LEANINGS]
            handle.write(",".join(cells) + "\n")


def read_series_csv(source, platform: str = "unknown", metric: str = "post_count") -> dict:
    close = False
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        handle = open(source, newline="")
        close = True
    else:
        handle = source
    try:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != SERIES_HEADER:
            raise ValueError(f"series CSV header must be {','.join(SERIES_HEADER)}, "
                             f"got {header}")
        dates = []
        columns = {leaning: [] for leaning in LEANINGS}
        for line_no, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != len(SERIES_HEADER):
                raise ValueError(f"series row {line_no}: expected "
                                 f"{len(SERIES_HEADER)} fields, got {len(cells)}")
            dates.append(dt.date.fromisoformat(cells[0]))
            for leaning, cell in zip(LEANINGS, cells[1:]):
                columns[leaning].append(float(cell) if cell.strip() else float("nan"))
        if not dates:
            raise ValueError("series CSV has no data rows")
        for i in range(1, len(dates)):
            if (dates[i] - dates[i - 1]).days != 1:
                raise ValueError(f"series dates must be consecutive; gap before {dates[i]}")
        return {leaning: DailySeries(start_date=dates[0],
                                     values=np.array(columns[leaning]),
                                     platform=platform, leaning=leaning, metric=metric)
                for leaning in LEANINGS}
    finally:
        if close:
            handle.close()


def write_value_series_csv(series: DailySeries, path) -> None:
    """Single-series export: header date,value."""
    with open(path, "w", newline="") as handle:
        handle.write("date,value\n")
        for day, value in zip(series.dates(), series.values):
            handle.write(f"{day.isoformat()},{_format_value(float(value))}\n")


def read_value_series_csv(source, metric: str = "synthetic") -> DailySeries:
    close = False
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        handle = open(source, newline="")
        close = True
    else:
        handle = source
    try:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["date", "value"]:
            raise ValueError(f"value series header must be date,value, got {header}")
        dates, values = [], []
        for line_no, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != 2:
                raise ValueError(f"series row {line_no}: expected 2 fields, got {len(cells)}")
            dates.append(dt.date.fromisoformat(cells[0]))
            values.append(float(cells[1]) if cells[1].strip() else float("nan"))
        if not dates:
            raise ValueError("value series CSV has no data rows")
        for i in range(1, len(dates)):
            if (dates[i] - dates[i - 1]).days != 1:
                raise ValueError(f"series dates must be consecutive; gap before {dates[i]}")
        return DailySeries(start_date=dates[0], values=np.array(values), metric=metric)
    finally:
        if close:
            handle.close()
