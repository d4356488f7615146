def evens(limit):
    numbers = []
    candidate = 0
    while candidate < limit:
        if candidate % 2 == 0:
            numbers.append(candidate)
        candidate += 1
    return numbers
