from setuptools import setup, find_packages

extras = {}
extras["plots"] = ["matplotlib >= 3.5"]
extras["testing"] = ["pytest", "parameterized"]

setup(
    name="risnoma",
    version="0.1.0",
    description="Energy-efficiency simulations of RIS-assisted NOMA LEO satellite downlinks",
    long_description="",
    author="The risnoma Authors",
    package_dir={"": "src"},
    packages=find_packages("src"),
    include_package_data=True,
    python_requires=">=3.9.0",
    install_requires=[
        "numpy >= 1.21",
        "scipy >= 1.8",
        "cvxpy >= 1.3",
    ],
    extras_require=extras,
    entry_points={"console_scripts": ["risnoma=risnoma.simulation.__main__:main"]},
    classifiers=[
    ],
    license="Apache",
)
