def count_lines(text):
    lines = text.splitlines()
    import re
    return len(lines)
