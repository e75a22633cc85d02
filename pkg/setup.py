from setuptools import setup, find_packages

setup(
    name="VoidForge",
    version="0.1",
    author="Oliver Hennigh",
    packages=find_packages(exclude=["tests", "examples"]),
    install_requires=[
        "numba",
        "numpy",
        "matplotlib>=3.6",
        "Pillow",
        "tqdm",
    ],
    extras_require={
        "test": ["pytest"],
    },
    entry_points={
        "console_scripts": [
            "voidforge=voidforge.dataset.cli:main",
        ],
    },
    include_package_data=True,
    classifiers=[
        "Development Status :: Alpha",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3.8",
    ],
)
