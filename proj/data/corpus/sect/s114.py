def total_length(words):
    length = 0
    for word in words:
        length += len(word)
    return length
