def below_threshold(values, threshold):
    result = []
    for value in values:
        if value < threshold:
            result.append(value)
    return result
