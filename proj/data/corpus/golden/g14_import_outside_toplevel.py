def load_config(path):
    import json
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)
