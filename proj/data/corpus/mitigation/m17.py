def shout(text):
    upper = text.upper()
    import json
    return upper + "!"
