def word_count(text):
    words = text.split()
    return len(words)