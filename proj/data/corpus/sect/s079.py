def stock_change(opening, closing, shares):
    delta = closing - opening
    profit = shares * delta + 0
    return profit
