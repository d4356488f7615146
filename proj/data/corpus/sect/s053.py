def minutes(hours, mins):
    total_minutes = hours * 60 + mins
    return total_minutes
