"""Published reference numbers, tagged "paper-reported".

These are documentation constants: ``reproduce`` prints them beside the
artifact's own numbers. Stochastic tests never use them as oracles.
"""
from __future__ import annotations

TAG = "paper-reported"

# basis-function counts with boundary (pre-wavelets): d -> {level: count}
TABLE_BOUNDARY = {
    2: {3: 49, 4: 113, 5: 257},
    3: {3: 225, 4: 593, 5: 1505},
    4: {3: 945, 4: 2769, 5: 7681},
    5: {3: 3753, 4: 12033, 5: 36033},
}

# counts without boundary (modified hats); d = 100 at level 5 is not tabulated
TABLE_NO_BOUNDARY = {
    2: {3: 17, 4: 49, 5: 129},
    4: {3: 49, 4: 209, 5: 769},
    5: {3: 71, 4: 351, 5: 1471},
    10: {3: 241, 4: 2001, 5: 13441},
    20: {3: 881, 4: 13201, 5: 154881},
    25: {3: 1351, 4: 24751, 5: 352351},
    50: {3: 5201, 4: 182001, 5: 4867201},
    100: {3: 20401, 4: 1394001},
}

QUADRATIC_D5 = {"reference": 1.0976, "ci": (1.0943, 1.1009), "picard": 1.1046}
QUADRATIC_D25_PICARD = 2.5481
QUADRATIC_D100_SECONDS = 3819

PERIODIC_D3_MSE = (0.0286, 0.0247, 0.0219, 0.0207, 0.0201)

# financial model, direct algorithm: d -> (y0, ci_low, ci_high)
FINANCIAL_DIRECT = {
    2: (4.3332, 4.2921, 4.3743),
    4: (7.0960, 7.0432, 7.1487),
    5: (8.0966, 8.0226, 8.1705),
    10: (10.9865, 10.9224, 11.0506),
    15: (11.848, 11.7853, 11.9107),
    20: (11.8674, 11.7962, 11.9387),
    25: (11.7801, 11.6467, 11.9135),
}
FINANCIAL_PICARD = {4: 7.1695, 20: 12.1386}
# external deep-learning baselines (context only)
FINANCIAL_DEEP = {2: 4.3516, 4: 7.1130, 5: 8.1010, 10: 10.9216, 15: 11.8226, 20: 11.9508, 25: 11.6416}

# challenging example: d -> (closed form, direct, Picard)
CHALLENGING = {
    1: (1.3776, 1.3790, 1.3825),
    2: (0.5707, 0.5795, 0.5794),
    5: (0.8466, 0.8734, 0.8606),
    8: (1.1603, 1.1745, 1.1801),
    10: (-0.2149, -0.2439, -0.2594),
}
# external baselines (DBDP1, DBDP2, HJE; None where the method did not converge)
CHALLENGING_DEEP = {
    1: (1.3720, 1.3736, 1.3724),
    2: (0.5715, 0.5708, 0.5715),
    5: (0.8666, 0.8365, None),
    8: (1.1694, 1.0758, None),
    10: (-0.3105, -0.3961, None),
}

BIFURCATION_THRESHOLD = -0.8  # approximate a below which the Picard iterates oscillate
