def average_length(words):
    lengths = [len(word) for word in words]
    from collections import Counter
    return sum(lengths) / len(lengths)
