#!/usr/bin/env python3
"""
Setup script for periocular_eval.
"""

from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

with open("requirements.txt", "r", encoding="utf-8") as fh:
    requirements = [
        line.split("#")[0].strip()
        for line in fh.read().splitlines()
        if line.split("#")[0].strip() and not line.startswith("pytest")
    ]

setup(
    name="periocular_eval",
    version="0.1.0",
    description="Periocular verification evaluation under attribute normalization",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: Apache Software License",
        "Topic :: Scientific/Engineering :: Image Recognition",
    ],
    python_requires=">=3.9",
    install_requires=requirements,
    entry_points={
        "console_scripts": [
            "periocular-eval=periocular_eval.cli:main",
        ],
    },
)
