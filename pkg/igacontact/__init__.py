"""Isogeometric large deformation frictional contact with varying-order NURBS discretizations."""
import logging

from igacontact.version import get_version

__IGACONTACT_LOGGER = logging.getLogger(__name__)


def init_logger(
    propagate: bool = False, log_level: int = logging.INFO, no_color: bool = False
):
    """Initiate the library internal logger.

    1. With a custom application logger the library logs propagate to it when ``propagate`` is
       True and this function does not have to be called. The library console format can still
       be applied with :py:func:`igacontact.logging.add_colorlog_console_logger`.
    2. Without any application logging, calling this function sets the log level and installs
       the colored console output.

    :param propagate: Specifies whether logs are propagated to the parent loggers
    :param log_level: Sets the log level of the library logger
    :param no_color: Plain console output without escape sequences
    """
    from igacontact.logging import add_colorlog_console_logger, add_plain_console_logger

    if no_color:
        add_plain_console_logger(__IGACONTACT_LOGGER, log_level)
    else:
        add_colorlog_console_logger(__IGACONTACT_LOGGER, log_level)
    __IGACONTACT_LOGGER.setLevel(level=log_level)
    __IGACONTACT_LOGGER.propagate = propagate


def get_lib_logger() -> logging.Logger:
    """Get the library logger, configured by :py:func:`init_logger`. Run directories attach
    their ``run.log`` file handler to this logger."""
    return __IGACONTACT_LOGGER
