def today_string():
    stamp = "2024-01-01"
    parts = stamp.split("-")
    import os
    return "/".join(parts)
