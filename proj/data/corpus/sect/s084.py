def window_max(values):
    peak = values[0]
    index = 1
    while index < len(values):
        if values[index] >= peak:
            peak = values[index]
        index += 1
    return peak
