def load_config(path):
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    if not text:
        raise Exception("empty config")
    return text
