import numpy as np

ALPHA_EXAMPLES = [
    ([[1, 2], [2, 4], [3, 6]], 8 / 9),
    ([[1, 1], [2, 2], [5, 5], [4, 4]], 1.0),
    ([[1, 1, 1], [2, 2, 2], [3, 3, 3]], 1.0),
]

PEARSON_EXAMPLES = [
    # Student t with one degree of freedom is Cauchy: p = 1 - 2 atan(t) / pi = 2/3 at t = 1/sqrt(3)
    ([1, 2, 3], [1, 3, 2], 0.5, 2 / 3),
    ([1, 2, 3, 4], [3, 5, 7, 9], 1.0, 0.0),
    ([1, 2, 3, 4], [-1, -2, -3, -4], -1.0, 0.0),
]


def even_df_two_sided_p(t, df):
    '''Closed form tail of Student t for even degrees of freedom, written out term by term.'''
    theta = np.arctan(abs(t) / np.sqrt(df))
    cos2 = np.cos(theta) ** 2
    term, total = 1.0, 1.0
    for j in range(1, df // 2):
        term *= cos2 * (2 * j - 1) / (2 * j)
        total += term

    return 1.0 - np.sin(theta) * total


T_P_EXAMPLES = [(t, df) for df in (2, 4, 10, 56) for t in (0.0, 0.3, -1.2247, 2.0, 2.65, 8.0)]
