def compound(value, rate, periods):
    for _ in range(periods):
        value += value * rate
    return value
