def total_seconds(days, hours):
    seconds = days * 86400 + hours * 3600
    return seconds
