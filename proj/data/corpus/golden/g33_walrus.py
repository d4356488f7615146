import re


def first_word(text):
    if (match := re.match(r"\w+", text)) is not None:
        return match.group(0)
    return None
