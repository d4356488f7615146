def word_lengths(sentence):
    lengths = []
    for word in sentence.split():
        lengths.append(len(word))
    return lengths
