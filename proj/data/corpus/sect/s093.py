def within_budget(prices, budget):
    total = 0
    bought = 0
    for price in prices:
        if total + price > budget:
            break
        total += price
        bought += 1
    return bought
