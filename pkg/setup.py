from setuptools import setup

setup(
    name="bcflip",
    version="0.1.0",
    description="Exact simulation of cheating strategies in bit-commitment based quantum coin flipping",
    author="The bcflip authors",
    packages=["bcflip"],
    install_requires=["numpy", "scipy"],
    extras_require={"test": ["pytest"]},
    entry_points={"console_scripts": ["bcflip = bcflip.cli:main"]},
)
