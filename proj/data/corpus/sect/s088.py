def normalize(values):
    top = max(values)
    if top == 0:
        return values
    return [value / top for value in values]
