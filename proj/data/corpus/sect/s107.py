def capped_sum(values, cap):
    total = 0
    for value in values:
        total += value
        if total >= cap:
            return cap
    return total
