def count_words(text, word):
    occurrences = 0
    for token in text.split():
        if token == word:
            occurrences += 1
    return occurrences
