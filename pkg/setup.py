from setuptools import setup, find_packages

setup(
    name="pyaxiology",
    version="0.1.0",
    packages=find_packages(exclude=["test", "test.*"]),
    install_requires=["numpy", "nltk", "requests", "pandas", "flask"],
    entry_points={"console_scripts": ["pyaxiology=pyaxiology.cli:main"]},
)
