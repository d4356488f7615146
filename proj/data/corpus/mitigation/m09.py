def square_all(values):
    result = []
    for value in values:
        result.append(value * value)
    return result