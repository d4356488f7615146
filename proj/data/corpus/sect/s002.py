def count_positive(values):
    count = 0
    for value in values:
        if value > 0:
            count += 1
    return count
