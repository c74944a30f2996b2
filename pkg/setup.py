from setuptools import setup, find_namespace_packages

# Read dependencies from requirements.txt
with open("requirements.txt", "r") as f:
    requirements = [line for line in f.read().splitlines() if line and not line.startswith("#")]

setup(
    name="kostkavol-core",
    version="0.1.0",
    description="Certified volume estimates for Kostka polytopes via continuous Schur functions",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    license="MIT",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    packages=find_namespace_packages(include=["kostkavol", "kostkavol.*"]),
    python_requires=">=3.9",
    install_requires=requirements,
    extras_require={
        "dev": ["pytest", "hypothesis", "mpmath", "black", "flake8"],
    },
    include_package_data=True,
    entry_points={
        "console_scripts": [
            "kostkavol=kostkavol.core.cli:main",
        ],
    },
)
