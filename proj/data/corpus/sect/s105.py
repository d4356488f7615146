def last_index(items, target):
    found = -1
    for i, item in enumerate(items):
        if item == target:
            found = i
    return found
