def repeat_word(word, times):
    text = ""
    for _ in range(times):
        text += word
    return text
