def shift_all(values, amount):
    for i in range(len(values)):
        values[i] += amount
    return values
