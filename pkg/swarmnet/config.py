# swarmnet/config.py
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


class Settings:
    def __init__(self):
        self.SEED = int(os.getenv("SWARMNET_SEED", "42"))
        self.OUT = os.getenv("SWARMNET_OUT", "./out")
        self.DATABASE_URL = os.getenv("SWARMNET_DATABASE_URL") or None
        self.LOG_LEVEL = os.getenv("SWARMNET_LOG_LEVEL", "INFO").upper()
        self.WORKERS = max(1, int(os.getenv("SWARMNET_WORKERS", "1")))


# Create a global instance called `settings`
settings = Settings()
