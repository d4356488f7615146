def parity_counts(values):
    even = 0
    odd = 0
    for value in values:
        if value % 2 == 0:
            even += 1
        else:
            odd += 1
    return even, odd
