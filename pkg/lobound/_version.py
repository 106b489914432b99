# Release version of the package. Bumped by the release process together
# with HISTORY.rst.

VERSION = "0.1.0"


def get_versions():
    return {
        "version": VERSION,
        "full-revisionid": None,
        "dirty": False,
        "error": None,
        "date": None,
    }
