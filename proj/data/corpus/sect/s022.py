def hypot_sq(a, b):
    c2 = a * a + b * b
    return c2
