"""Setup configuration for teamgame."""

from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="teamgame",
    version="0.1.0",
    author="teamgame contributors",
    description="Best responses, equilibrium search and distances for multi-principal team mechanism games",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
    ],
    python_requires=">=3.9",
    install_requires=[
        "click>=8.1.0",
        "pyyaml>=6.0",
        "colorama>=0.4.6",
        "python-dotenv>=1.0.0",
        "numpy>=1.24",
        "scipy>=1.10",
        "networkx>=3.0",
    ],
    extras_require={
        "test": ["pytest>=7.0"],
    },
    entry_points={
        "console_scripts": [
            "teamgame=teamgame.cli:cli",
        ],
    },
    include_package_data=True,
    package_data={
        "teamgame": [
            "profiles/*.yaml",
            "configs/*.yaml",
        ],
    },
)
