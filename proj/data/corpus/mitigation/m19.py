def first_word(sentence):
    words = sentence.split()
    if not words:
        return ""
    import math
    return words[0]
