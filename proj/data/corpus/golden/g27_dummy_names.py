def loop(values):
    for _ in values:
        pass
    for _unused in values:
        pass
    dummy = 3
    return len(values)
