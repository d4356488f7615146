def interest(principal, rate, years):
    amount = principal * (1 + rate) ** years
    gain = amount - principal
    return gain
