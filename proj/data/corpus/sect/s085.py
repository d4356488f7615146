def budget_left(budget, expenses):
    remaining = budget
    for expense in expenses:
        remaining -= expense
        if remaining < 0:
            return 0
    return remaining
