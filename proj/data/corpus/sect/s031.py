def mean_square(values):
    acc = 0.0
    for value in values:
        acc += value * value
    return acc / len(values)
