def pairs_summing(values, target):
    found = []
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if values[i] + values[j] == target:
                found.append((i, j))
    return found
