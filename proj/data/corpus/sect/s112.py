def percent_change(old, new):
    if old == 0:
        return None
    change = (new - old) / old * 100
    return change
