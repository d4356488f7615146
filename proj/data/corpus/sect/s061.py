def first_negative(values):
    for value in values:
        if value < 0:
            return value
    return None
