"""CMake-backed build of the compiled module.

The extension is produced by the project's own CMake tree (which also
builds the CLI and tests); this file only drives a configure + build of
the _icrb target and copies the result into the wheel layout.
"""

import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str, sourcedir: str = "") -> None:
        super().__init__(name, sources=[])
        self.sourcedir = str(Path(sourcedir).resolve())


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        out_path = Path(self.get_ext_fullpath(ext.name)).resolve()
        out_path.parent.mkdir(parents=True, exist_ok=True)

        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        cmake_args = [
            f"-DPython3_EXECUTABLE={sys.executable}",
            "-DCMAKE_BUILD_TYPE=Release",
            "-DICRB_BUILD_CLI=OFF",
            "-DICRB_BUILD_TESTS=OFF",
        ]
        try:
            import pybind11

            cmake_args.append(f"-Dpybind11_DIR={pybind11.get_cmake_dir()}")
        except ImportError:
            pass

        subprocess.run(
            ["cmake", ext.sourcedir, *cmake_args], cwd=build_dir, check=True
        )
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_icrb"],
            cwd=build_dir,
            check=True,
        )

        built = sorted((build_dir / "python" / "icrb_so3").glob("_icrb.*"))
        if not built:
            raise RuntimeError("CMake did not produce the _icrb module")
        shutil.copy2(built[-1], out_path)


setup(
    ext_modules=[CMakeExtension("icrb_so3._icrb")],
    cmdclass={"build_ext": CMakeBuild},
)
