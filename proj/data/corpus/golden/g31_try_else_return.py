def read_int(text):
    try:
        value = int(text)
    except ValueError:
        return None
    else:
        return value
