def divide(numerator, denominator):
    if denominator == 0:
        message = "division by zero"
        raise Exception(message)
    return numerator / denominator
