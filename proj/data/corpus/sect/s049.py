def quadratic(a, b, c, x):
    y = a * x * x + b * x + c
    return y
