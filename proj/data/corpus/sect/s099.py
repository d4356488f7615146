def counts_above_mean(values):
    mean = sum(values) / len(values)
    above = 0
    for value in values:
        if value > mean:
            above += 1
    return above
