from setuptools import setup, find_packages

setup(
    name="catalan-functionals",
    version="0.1.0",
    packages=find_packages(include=["catalan_functionals*"]),
    package_data={"catalan_functionals": ["defaults/*.yaml", "schemas/*.json"]},
    install_requires=[
        "jsonschema>=4.19",
        "pandas>=2.2",
        "pyyaml>=6.0",
        "rich>=13.7",
        "click>=8.1",
        "numpy>=1.26",
        "scipy>=1.11",
        "mpmath>=1.3",
        "numba>=0.59"
    ],
    entry_points={
        "console_scripts": [
            "catalan-moments=catalan_functionals.cli:main",
        ],
    },
)
