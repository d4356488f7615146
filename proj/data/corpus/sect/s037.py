def count_matches(a, b):
    matches = 0
    for x, y in zip(a, b):
        if x == y:
            matches += 1
    return matches
