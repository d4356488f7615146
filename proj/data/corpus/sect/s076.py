def report(name, score):
    message = name + ": " + str(score)
    if score >= 50:
        message += " pass"
    return message
