def power_sum(n):
    total = 0
    for k in range(n):
        total += k * k
    return total
