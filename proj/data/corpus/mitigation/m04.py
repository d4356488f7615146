def pick(items, index):
    count = len(items)
    if index >= count:
        raise Exception("index too large")
    return items[index]
