def total_price(prices, tax):
    total = 0
    for price in prices:
        total += price
    if total == 0:
        return 0
    return total + total * tax
