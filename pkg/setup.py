from setuptools import setup

setup(
    name="dirichlet-inversion",
    version="0.1.0",
    packages=["src"],
    install_requires=[
        "numpy>=1.24.0",
        "pandas>=1.5.0",
        "scipy>=1.10.0",
        "mpmath>=1.3.0",
        "pydantic>=2.0.0",
        "python-dotenv>=1.0.0",
    ],
    entry_points={"console_scripts": ["dirichlet-inversion=src.cli:main"]},
    python_requires=">=3.9",
)
