def histogram(values, bins):
    counts = [0] * bins
    for value in values:
        slot = min(int(value * bins), bins - 1)
        counts[slot] += 1
    return counts
