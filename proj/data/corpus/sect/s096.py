def harmonic(n):
    value = 0.0
    for k in range(1, n + 1):
        value += 1 / k
    return value
