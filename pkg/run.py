import os

from dotenv import load_dotenv

# settings are read from the environment when config is imported
load_dotenv()

from __init__ import create_app  # noqa: E402
from config import DevelopmentConfig, ProductionConfig  # noqa: E402

# Choose config based on environment
config = ProductionConfig if os.environ.get('CBN_ENV') == 'production' else DevelopmentConfig

app = create_app(config)

if __name__ == '__main__':
    app(prog_name='cbn')
