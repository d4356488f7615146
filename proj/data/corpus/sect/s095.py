def describe(number):
    parts = []
    if number % 3 == 0:
        parts.append("fizz")
    if number % 5 == 0:
        parts.append("buzz")
    if len(parts) == 0:
        return str(number)
    return "".join(parts)
