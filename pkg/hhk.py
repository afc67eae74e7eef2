# hhk.py
import os

from app import create_app
from config import DevelopmentConfig, ProductionConfig
from utils.logger import setup_logging

config_class = DevelopmentConfig if os.getenv('HHK_ENV') == 'development' else ProductionConfig

# Setup logging first
log_file = setup_logging(config_class.LOG_DIR, config_class.LOG_LEVEL)

app = create_app(config_class)

if __name__ == '__main__':
    app()
