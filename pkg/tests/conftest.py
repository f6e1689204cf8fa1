import warnings

warnings.filterwarnings("ignore", message=".*TBB.*",
                        category=Warning, module="numba.*")
