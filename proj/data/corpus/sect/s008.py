def max_of(items):
    best = items[0]
    for item in items:
        if item > best:
            best = item
    return best
