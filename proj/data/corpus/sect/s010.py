def poly(x):
    value = 3 * x * x + 2 * x - 7
    return value
