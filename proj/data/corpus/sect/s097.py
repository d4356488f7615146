def score_game(rolls):
    score = 0
    frame = 0
    for roll in rolls:
        score += roll
        if roll == 10:
            frame += 1
    return score + frame * 10
