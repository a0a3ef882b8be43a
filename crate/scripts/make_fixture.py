"""Generate the bundled S&P-shaped OHLCV fixture.

The path is a seeded Brownian bridge through approximate historical index
levels, so the series has the index's broad shape (2009 trough, 2020 crash,
2022 drawdown) without being real market data.
"""
import numpy as np
import pandas as pd

ANCHORS = [
    ("2009-01-02", 931.8),
    ("2009-03-09", 683.0),
    ("2010-04-23", 1217.0),
    ("2010-07-02", 1022.0),
    ("2011-04-29", 1363.0),
    ("2011-10-03", 1099.0),
    ("2012-09-14", 1465.0),
    ("2012-11-15", 1353.0),
    ("2013-12-31", 1848.0),
    ("2015-05-21", 2131.0),
    ("2016-02-11", 1829.0),
    ("2017-12-29", 2673.0),
    ("2018-01-26", 2872.0),
    ("2018-12-24", 2351.0),
    ("2020-02-19", 3386.0),
    ("2020-03-23", 2237.0),
    ("2021-01-04", 3700.0),
    ("2022-01-03", 4796.0),
    ("2022-03-08", 4170.0),
    ("2022-03-29", 4631.0),
    ("2022-05-20", 3901.0),
]


def main(path="data/sp500_fixture.csv", seed=20220520):
    rng = np.random.default_rng(seed)
    dates = pd.bdate_range("2009-01-02", "2022-05-20")
    anchor_dates = pd.to_datetime([d for d, _ in ANCHORS])
    anchor_idx = [dates.get_indexer([d], method="nearest")[0] for d in anchor_dates]
    log_close = np.empty(len(dates))
    for (i0, (_, v0)), (i1, (_, v1)) in zip(
        zip(anchor_idx, ANCHORS), zip(anchor_idx[1:], ANCHORS[1:])
    ):
        n = i1 - i0
        vol = 0.011
        if "2020-02" <= str(dates[i0].date()) <= "2020-06":
            vol = 0.03
        steps = rng.normal(0.0, vol, n)
        walk = np.concatenate([[0.0], np.cumsum(steps)])
        t = np.arange(n + 1) / n
        bridge = walk - t * walk[-1]
        log_close[i0 : i1 + 1] = np.log(v0) + t * (np.log(v1) - np.log(v0)) + bridge
    close = np.exp(log_close)
    gap = rng.normal(0.0, 0.003, len(dates))
    open_ = np.concatenate([[close[0] * (1 + gap[0])], close[:-1] * (1 + gap[1:])])
    hi_ext = np.abs(rng.normal(0.0, 0.004, len(dates)))
    lo_ext = np.abs(rng.normal(0.0, 0.004, len(dates)))
    high = np.maximum(open_, close) * (1 + hi_ext)
    low = np.minimum(open_, close) * (1 - lo_ext)
    volume = rng.integers(2_000_000_000, 6_000_000_000, len(dates))
    with open(path, "w") as f:
        f.write("Date,Open,High,Low,Close,Adj Close,Volume\n")
        for d, o, h, l, c, v in zip(dates, open_, high, low, close, volume):
            f.write(f"{d.date()},{o:.6f},{h:.6f},{l:.6f},{c:.6f},{c:.6f},{v}\n")


if __name__ == "__main__":
    main()
