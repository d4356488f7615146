def moving_total(values, window):
    totals = []
    current = 0
    for i, value in enumerate(values):
        current += value
        if i >= window:
            current -= values[i - window]
        if i >= window - 1:
            totals.append(current)
    return totals
