def weighted(values, weights):
    num = 0
    den = 0
    for v, w in zip(values, weights):
        num += v * w
        den += w
    if den == 0:
        return 0
    return num / den
