def mid(a, b):
    midpoint = a + (b - a) / 2
    return midpoint
