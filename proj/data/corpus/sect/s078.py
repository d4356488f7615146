def threshold_flags(values, limit):
    return [value > limit for value in values]
