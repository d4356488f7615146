def score_letters(word):
    points = 0
    for ch in word:
        if ch == "z":
            points += 10
        else:
            points += 1
    return points
