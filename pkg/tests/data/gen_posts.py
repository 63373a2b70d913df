"""Regenerate the frozen test corpus (posts_100.csv, bias.csv).

100 twitter posts over 2018-01-01..2018-01-20: 25 cnn.com (left),
20 nytimes.com (left_leaning), 15 reuters.com (center), 10 wsj.com
(right_leaning), 20 foxnews.com (right), 10 example.org (no bias entry,
stays unlabeled).  Timestamps, likes and sentiment come from one seeded
generator, so rerunning reproduces the files byte for byte.  The counts
asserted in test_cli.py are frozen against this output.
"""

import pathlib

import numpy as np

HERE = pathlib.Path(__file__).parent

DOMAINS = [
    ("cnn.com", "left", 25),
    ("nytimes.com", "left_leaning", 20),
    ("reuters.com", "center", 15),
    ("wsj.com", "right_leaning", 10),
    ("foxnews.com", "right", 20),
    ("example.org", None, 10),
]


def main():
    rng = np.random.default_rng(20180101)
    lines = ["post_id,timestamp,platform,url_or_domain,likes,sentiment"]
    pid = 0
    for domain, _, count in DOMAINS:
        for _ in range(count):
            pid += 1
            day = int(rng.integers(1, 21))
            hour = int(rng.integers(0, 24))
            minute = int(rng.integers(0, 60))
            likes = int(rng.integers(0, 50))
            sentiment = round(float(rng.uniform(-1.0, 1.0)), 2)
            lines.append(
                f"p{pid:03d},2018-01-{day:02d}T{hour:02d}:{minute:02d}:00,"
                f"twitter,https://www.{domain}/item/{pid},{likes},{sentiment}")
    (HERE / "posts_100.csv").write_text("\n".join(lines) + "\n")
    bias = ["domain,leaning"] + [f"{d},{l}" for d, l, _ in DOMAINS if l]
    (HERE / "bias.csv").write_text("\n".join(bias) + "\n")


if __name__ == "__main__":
    main()
