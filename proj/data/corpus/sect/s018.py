def running_sum(values):
    out = []
    running = 0
    for value in values:
        running += value
        out.append(running)
    return out
