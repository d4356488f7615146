def ratio(part, whole):
    if whole == 0:
        return 0.0
    share = part / whole * 100
    return share
