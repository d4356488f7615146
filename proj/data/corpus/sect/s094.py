def lcm(a, b):
    product = a * b
    while b != 0:
        a, b = b, a % b
    return product // a
