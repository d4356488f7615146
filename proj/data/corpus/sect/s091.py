def find_max_index(values):
    best_index = 0
    for idx in range(len(values)):
        if values[idx] > values[best_index]:
            best_index = idx
    return best_index
