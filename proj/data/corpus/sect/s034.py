def between(value, low, high):
    return low <= value and value <= high
