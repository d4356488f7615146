def accumulate(values):
    total = 0
    for v in values:
        total += v
    seen = 0
    seen += 1
    return total
