def parse(text):
    import re
    import json
    return json.loads(text)
