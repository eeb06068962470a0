from setuptools import setup, find_packages

setup(
    name="surgery_pipeline",
    version="0.1.0",
    description="Lagrangian surgery pipeline: potentials, surgered disk atlases and Floer cohomology reports",
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    python_requires=">=3.9",
    install_requires=[
        # Core numerical and data processing
        "numpy>=1.21.0",
        "pandas>=1.3.0",
        # Configuration files
        "PyYAML>=5.1",
    ],
    extras_require={
        "dev": [
            "pytest>=7.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "surgery-pipeline=pipeline.cli:main",
        ],
    },
)
