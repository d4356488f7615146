def safe_div(num, den):
    try:
        return num / den
    except ZeroDivisionError as err:
        return None
