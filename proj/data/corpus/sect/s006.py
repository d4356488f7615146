def fib(n):
    a, b = 0, 1
    index = 0
    while index < n:
        a, b = b, a + b
        index += 1
    return a
