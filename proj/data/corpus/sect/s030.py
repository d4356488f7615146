def index_of(items, target):
    position = 0
    for item in items:
        if item == target:
            return position
        position += 1
    return -1
