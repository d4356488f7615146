def tip(bill, percent, people):
    share = bill + bill * percent / 100
    return share / people
