def check_age(record):
    name = record.get("name", "")
    age = record.get("age", 0)
    label = name.strip().title()
    if age < 0:
        raise Exception("negative age")
    return label, age >= 18
