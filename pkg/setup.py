from setuptools import setup, find_packages

setup(
    name="solar_panel_cleaner",
    version="0.1.0",
    description="Solar panel cleaning robot control library and desk-scale simulator",
    packages=find_packages(),
    install_requires=[
        "numpy>=1.20.0",
        "pandas>=1.5.0",
        "scipy>=1.7.0",
        "matplotlib>=3.4.0",
        "seaborn>=0.12.0",
        "tqdm>=4.62.0",
        "python-dotenv>=1.0.0",
    ],
    extras_require={
        "test": ["pytest>=7.0.0"],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Developers",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Topic :: Scientific/Engineering",
    ],
    python_requires=">=3.8",
)
