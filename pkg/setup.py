from setuptools import setup, find_packages

setup(
    name="twostep-mixture",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "examples*"]),
    install_requires=[
        "numpy>=1.22",  # Arrays and the PCG64/SeedSequence generators
        "scipy>=1.8",   # Distances, graph components, eigensolver, normal law, quadrature
    ],
    extras_require={
        "test": ["pytest>=7"],
    },
    python_requires=">=3.8",
)
