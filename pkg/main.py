"""
    Purpose:
    Command-line entry point of the NPU tile emulator.

    Description:
    Hands argv to the command routes and exits with the status they return:
        python main.py run-script docs/examples/board_validation.script
        python main.py run-workload docs/examples/gemm16.ini --seed 7 --report out.ini
        python main.py register-map
        python main.py perf --m 16 --n 16 --k 16

    Created Date: 2026-10-19
    Version: V1
"""

# region Imports
import sys

from npuSim.routes.CommandRoutes import dispatch
# endregion


# region Main Function
def main(argv=None):
    return dispatch(argv)


if __name__ == "__main__":
    sys.exit(main())
# endregion
