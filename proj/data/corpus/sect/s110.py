def pad_number(number, width):
    text = str(number)
    while len(text) < width:
        text = "0" + text
    return text
