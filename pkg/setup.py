from setuptools import setup

VERSION = "0.1.0"

setup(
    name="vlcsim",
    version=VERSION,
    license="GPL v3",
    description=("Physical-layer attack simulator for visible light communication"),
    long_description=(""),
    classifiers=[
        "Intended Audience :: Science/Research",
        "Intended Audience :: Developers",
        "License :: OSI Approved :: GNU General Public License v3 (GPLv3)",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Physics",
        "Topic :: Security",
        "Development Status :: 3 - Alpha",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
    ],
    keywords=["vlc", "lifi", "jamming", "optical wireless"],
    zip_safe=False,
    platforms="any",
    packages=["vlcsim"],
    package_data={"vlcsim": ["data/*.json"]},
    python_requires=">=3.8",
    install_requires=[
        "attrs>=19.3",
        "atomicwrites-homeassistant==1.4.1",
        "numpy>=1.21",
        "scipy>=1.7",
    ],
    entry_points={"console_scripts": ["vlcsim = vlcsim.cli:main"]},
)
