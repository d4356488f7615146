def compute_total(prices):
    total = 0
    count = len(prices)
    for price in prices:
        total += price
    return total
