def same_length(first, second):
    return len(first) == len(second)
