import asyncio


async def fetch(delay, label):
    await asyncio.sleep(delay)
    result = label.upper()
    return delay
