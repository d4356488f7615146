def elapsed(start, end):
    if end < start:
        end += 24
    duration = end - start
    return duration
