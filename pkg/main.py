import sys

# Load environment variables from .env file if it exists
from dotenv import load_dotenv
load_dotenv()

from storm_forecast.cli import main

if __name__ == "__main__":
    sys.exit(main())
