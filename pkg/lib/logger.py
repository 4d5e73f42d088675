import logging
from colorlog import ColoredFormatter


# this logger is for logging formatter
def setup_logger(log_file_path: str = None):
    """Return a logger with a default ColoredFormatter, optionally also writing to log_file_path."""
    formatter = ColoredFormatter(
        "%(asctime)s %(log_color)s%(levelname)-8s %(message)s",
        datefmt='%Y-%m-%d %H:%M:%S',
        reset=True,
        log_colors={
            'DEBUG': 'blue',
            'WARNING': 'yellow',
            'ERROR': 'red',
            'CRITICAL': 'red',
        })

    logger = logging.getLogger(__name__)
    if not any(isinstance(h, logging.StreamHandler) and not isinstance(h, logging.FileHandler)
               for h in logger.handlers):
        shandler = logging.StreamHandler()
        shandler.setFormatter(formatter)
        shandler.setLevel(level=logging.INFO)
        logger.addHandler(shandler)

    if log_file_path is not None:
        fhandler = logging.FileHandler(log_file_path)
        fhandler.setFormatter(logging.Formatter("%(asctime)s %(levelname)-8s %(message)s",
                                                datefmt='%Y-%m-%d %H:%M:%S'))
        fhandler.setLevel(level=logging.INFO)
        logger.addHandler(fhandler)

    logger.setLevel(level=logging.INFO)
    return logger


logger = setup_logger()
