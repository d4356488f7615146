def clamp(value, low, high):
    if value < low:
        value = low
    else:
        value = min(value, high)
    return value
